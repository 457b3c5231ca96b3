# src/potential.py
"""
Potenciais horizontais em ordem limitada: dado σ de bigrau (k,s), procura ξ
de bigrau (k,s−1) com d_Hξ = σ dentro de um espaço de monômios.

d_H preserva uma multigraduação dos termos (grau por campo nas variáveis de
jato, multiconjunto dos campos dos fatores θ e, para cada direção μ de base,
W_μ = cont_μ − grau_x_μ − [dx^μ presente], onde cont_μ conta as ocorrências
de μ nos índices de jatos e de θ). O sistema linear se quebra em blocos, um por
grau, e cada bloco é resolvido exatamente sobre Q (ou sobre o corpo de frações
dos parâmetros declarados) com as variáveis livres fixadas em zero.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.matrices import DomainMatrix

from .calculus import IdentityCheckError, dH
from .expressions import Expression
from .forms import Form, WedgeMonomial
from .jets import BundleSignature, JetVariable, enumerate_jets

# Monômio de coordenadas: tupla ordenada de (nome do símbolo, expoente).
CoordMonomial = Tuple[Tuple[str, int], ...]
Grade = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class Bounds:
    """
    Limites do espaço de busca. None significa "derivar da entrada":
    ordem de jato da entrada + 1 e grau polinomial da entrada (no mínimo 1).
    """

    max_jet_order: Optional[int] = None
    max_poly_degree: Optional[int] = None

    def __post_init__(self):
        for name in ("max_jet_order", "max_poly_degree"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < 1):
                logging.error("Limite inválido %s=%s", name, value)
                raise ValueError(f"{name} must be a positive integer, got {value}")

    def resolve(self, sigma: Form) -> "Bounds":
        order = self.max_jet_order if self.max_jet_order is not None else sigma.order + 1
        degree = self.max_poly_degree if self.max_poly_degree is not None else max(form_degree(sigma), 1)
        return Bounds(order, degree)


def form_degree(phi: Form) -> int:
    """Maior grau polinomial (em x e jatos) dos coeficientes."""
    return max((coeff.degree() for coeff in phi.terms.values()), default=0)


def _monomials(coeff: Expression) -> Dict[CoordMonomial, sympy.Expr]:
    """Decompõe um coeficiente polinomial em {monômio de coordenadas: coeficiente}."""
    gens = coeff.coordinate_symbols()
    if not gens:
        return {(): coeff.expr}
    out: Dict[CoordMonomial, sympy.Expr] = {}
    for exps, c in sympy.Poly(coeff.expr, *gens).terms():
        key = tuple((g.name, e) for g, e in zip(gens, exps) if e)
        out[key] = sympy.sympify(c)
    return out


def _grade(sig: BundleSignature, mono: WedgeMonomial, key: CoordMonomial) -> Grade:
    degrees = [0] * sig.m
    counts = [0] * sig.n
    xdeg = [0] * sig.n
    for name, e in key:
        kind = sig.classify(sympy.Symbol(name))
        if kind[0] == "base":
            xdeg[kind[1]] += e
        else:
            jv = kind[1]
            degrees[jv.field] += e
            for mu, c in enumerate(jv.index.counts):
                counts[mu] += e * c
    for jv in mono.theta_factors:
        for mu, c in enumerate(jv.index.counts):
            counts[mu] += c
    weights = tuple(counts[mu] - xdeg[mu] - (1 if mu in mono.dx_factors else 0) for mu in range(sig.n))
    return tuple(degrees), tuple(sorted(jv.field for jv in mono.theta_factors)), weights


def _candidates(sig: BundleSignature, grade: Grade, k: int, s: int,
                bounds: Bounds) -> List[Tuple[WedgeMonomial, CoordMonomial]]:
    """Todos os monômios de bigrau (k,s) do grau pedido, dentro dos limites."""
    degrees, theta_fields, weights = grade
    jets = enumerate_jets(sig, bounds.max_jet_order)
    by_field = [[jv for jv in jets if jv.field == i] for i in range(sig.m)]
    out = []
    for dx_set in combinations(range(sig.n), s):
        for thetas in combinations(jets, k):
            if tuple(sorted(jv.field for jv in thetas)) != theta_fields:
                continue
            parts = [combinations_with_replacement(by_field[i], degrees[i]) for i in range(sig.m)]
            for choice in product(*parts):
                chosen = [jv for part in choice for jv in part]
                xdeg = []
                for mu in range(sig.n):
                    count = sum(jv.index.counts[mu] for jv in chosen) + sum(jv.index.counts[mu] for jv in thetas)
                    xdeg.append(count - weights[mu] - (1 if mu in dx_set else 0))
                if any(d < 0 for d in xdeg) or sum(xdeg) + len(chosen) > bounds.max_poly_degree:
                    continue
                powers: Dict[str, int] = {}
                for mu, d in enumerate(xdeg):
                    if d:
                        powers[sig.base_names[mu]] = d
                for jv in chosen:
                    name = jv.name(sig)
                    powers[name] = powers.get(name, 0) + 1
                mono = WedgeMonomial(tuple(dx_set), tuple(thetas))
                key = tuple(sorted(powers.items()))
                out.append((_candidate_key(mono, key, chosen, xdeg), (mono, key)))
    # colunas menores primeiro: viram pivôs e o ξ devolvido fica mínimo
    out.sort(key=lambda item: item[0])
    return [candidate for _, candidate in out]


def _candidate_key(mono: WedgeMonomial, key: CoordMonomial, chosen: Sequence[JetVariable],
                   xdeg: Sequence[int]) -> tuple:
    """(ordem de jato, grau total, grau em x, fatores na ordem canônica, monômio de forma)."""
    factors = sorted(list(chosen) + list(mono.theta_factors))
    order = max((jv.order for jv in factors), default=0)
    return (order, len(chosen) + sum(xdeg), sum(xdeg), tuple(jv.sort_key() for jv in factors),
            tuple(-d for d in xdeg), mono.sort_key(), key)


def _coord_expr(key: CoordMonomial) -> sympy.Expr:
    return sympy.Mul(*[sympy.Symbol(name) ** e for name, e in key])


def _rows(phi: Form) -> Dict[Tuple[WedgeMonomial, CoordMonomial], sympy.Expr]:
    rows = {}
    for mono, coeff in phi.items():
        for key, c in _monomials(coeff).items():
            rows[(mono, key)] = c
    return rows


def _solve_block(sig: BundleSignature, target: Dict[Tuple[WedgeMonomial, CoordMonomial], sympy.Expr],
                 candidates: Sequence[Tuple[WedgeMonomial, CoordMonomial]]) -> Optional[Form]:
    images = [_rows(dH(Form(sig, {mono: Expression(sig, _coord_expr(key))}))) for mono, key in candidates]
    row_keys = sorted(set(target).union(*[set(img) for img in images]),
                      key=lambda rk: (rk[0].sort_key(), rk[1]))
    if not row_keys:
        return Form.zero(sig)
    matrix = [
        [img.get(rk, sympy.Integer(0)) for img in images] + [target.get(rk, sympy.Integer(0))]
        for rk in row_keys
    ]
    logging.debug("Bloco do ansatz: %d equações, %d incógnitas", len(row_keys), len(candidates))
    reduced, pivots = DomainMatrix.from_list_sympy(len(matrix), len(candidates) + 1, matrix).to_field().rref()
    if len(candidates) in pivots:
        return None
    values = reduced.to_Matrix()
    out = Form.zero(sig)
    for row, col in enumerate(pivots):
        value = values[row, len(candidates)]
        if value != 0:
            mono, key = candidates[col]
            out = out + Form(sig, {mono: Expression(sig, value * _coord_expr(key))})
    return out


def find_horizontal_potential(sigma: Form, bounds: Optional[Bounds] = None) -> Optional[Form]:
    """
    Procura ξ com d_Hξ = σ no espaço de monômios limitado por `bounds`.

    Args:
        sigma: forma homogênea de bigrau (k,s), 1 <= s <= n
        bounds: limites do ansatz (padrões derivados da entrada)

    Returns:
        ξ verificado exatamente, ou None se não houver solução nos limites,
        se s = 0 com σ != 0, ou se os coeficientes saírem do núcleo polinomial.

    Raises:
        ValueError: limites não positivos ou σ não homogênea.
    """
    bounds = bounds or Bounds()
    sig = sigma.sig
    if sigma.is_zero():
        return Form.zero(sig)
    k, s = sigma.bidegree()
    if s == 0:
        logging.info("Forma de grau horizontal 0 não tem potencial horizontal")
        return None
    if not sigma.is_polynomial():
        logging.warning("Coeficientes fora do núcleo polinomial: busca de potencial não realizada")
        return None
    used = bounds.resolve(sigma)

    blocks: Dict[Grade, Dict[Tuple[WedgeMonomial, CoordMonomial], sympy.Expr]] = {}
    for (mono, key), c in _rows(sigma).items():
        blocks.setdefault(_grade(sig, mono, key), {})[(mono, key)] = c
    logging.info("Potencial horizontal: bigrau (%d,%d), %d blocos, limites (%d,%d)",
                 k, s, len(blocks), used.max_jet_order, used.max_poly_degree)

    xi = Form.zero(sig)
    for grade in sorted(blocks):
        candidates = _candidates(sig, grade, k, s - 1, used)
        part = _solve_block(sig, blocks[grade], candidates) if candidates else None
        if part is None:
            logging.warning("Sem potencial nos limites (%d,%d) para o bloco %s",
                            used.max_jet_order, used.max_poly_degree, grade)
            return None
        xi = xi + part

    if dH(xi) != sigma:
        logging.error("Potencial encontrado não satisfaz d_H(xi) = sigma")
        raise IdentityCheckError("horizontal potential failed its residual check")
    return xi
