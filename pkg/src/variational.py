# src/variational.py
"""
Algoritmos variacionais sobre o bicomplexo: operador de Euler–Lagrange,
fórmula variacional primeira com a corrente de Noether canônica,
classificação de simetrias, condição de Helmholtz, identidade mestra e
decomposição de formas (k,n) em parte-fonte + d_H-exata.

Todas as verificações são identidades exatas fora da casca: nenhuma
afirmação "na casca" é representada como variedade.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import sympy

from .calculus import (
    IdentityCheckError,
    VerticalField,
    contract,
    dH,
    dTotal,
    delta_var,
    lie_derivative,
    tau,
    total_derivative,
    total_derivative_iter,
)
from .expressions import Expression
from .forms import Form, SourceForm, project
from .jets import BundleSignature, JetVariable, MultiIndex
from .potential import Bounds, find_horizontal_potential
from .structures import DescentQueue

__all__ = [
    "IdentityCheckError",
    "Lagrangian",
    "VariationalSplit",
    "SymmetryReport",
    "HelmholtzReport",
    "SourceDecomposition",
    "InvarianceReport",
    "KIND_EXACT",
    "KIND_DIVERGENCE",
    "KIND_NONE",
    "euler_lagrange",
    "integrate_by_parts",
    "first_variational_split",
    "noether",
    "helmholtz_check",
    "vainberg_tonti_lagrangian",
    "master_identity_residual",
    "decompose_source",
    "is_variationally_trivial",
    "euler_lagrange_invariance",
]

KIND_EXACT = "exact"
KIND_DIVERGENCE = "divergence"
KIND_NONE = "none-at-order"


@dataclass(frozen=True)
class Lagrangian:
    """Lagrangiana L = 𝓛·ω, horizontal de bigrau (0,n)."""

    density: Expression

    @property
    def sig(self) -> BundleSignature:
        return self.density.sig

    @property
    def order(self) -> int:
        return self.density.order

    def form(self) -> Form:
        return Form.omega(self.sig, self.density)

    def is_complete(self) -> bool:
        return self.density.is_complete()


@dataclass(frozen=True)
class VariationalSplit:
    """h_1(dL) = el + d_H(boundary), verificada exatamente na construção."""

    el: SourceForm
    boundary: Form
    residual_checked: bool = True


@dataclass(frozen=True)
class SymmetryReport:
    """
    Classificação de u como simetria de L.

    `current` é 𝔍_u = −J^∞u⌟φ (exata) ou 𝔍_u − σ (divergência); é canônica
    módulo formas d_H-fechadas. `residual` guarda d_H(current) + u⌟δL,
    que é zero quando kind != none-at-order.
    """

    kind: str
    lie: Form
    sigma: Optional[Form]
    current: Optional[Form]
    noether_current: Form
    residual: Form
    onshell_identity_checked: bool
    bounds_used: Optional[Bounds] = None
    complete: bool = True


@dataclass(frozen=True)
class HelmholtzReport:
    """Veredito local de δ(E) = 0, com certificado Lagrangiano quando disponível."""

    variational: bool
    obstruction: Optional[Form]
    certificate: Optional[Lagrangian] = None
    complete: bool = True


@dataclass(frozen=True)
class SourceDecomposition:
    """ψ = source + d_H(potential); potential é None quando o ansatz não achou solução."""

    source: Form
    potential: Optional[Form]
    bounds_used: Optional[Bounds] = None
    complete: bool = True


@dataclass(frozen=True)
class InvarianceReport:
    """τ(L_{J^∞u}δL) e δ(L_{J^∞u}L), que a identidade mestra força a coincidir."""

    invariant: bool
    lie_of_source: Form
    variation_of_lie: Form
    complete: bool = True


def _check(condition: bool, message: str) -> None:
    if not condition:
        logging.error("Identidade exata falhou: %s", message)
        raise IdentityCheckError(message)


# --- Euler–Lagrange e descida ----------------------------------------------

def euler_lagrange(L: Lagrangian) -> SourceForm:
    """E_i = Σ_Λ (−1)^{|Λ|} d_Λ(∂^Λ_i 𝓛), somando sobre os jatos presentes em 𝓛."""
    sig = L.sig
    components: Dict[int, Expression] = {}
    for jv in L.density.jet_variables():
        term = total_derivative_iter(L.density.diff_jet(jv), jv.index)
        if jv.order % 2:
            term = -term
        components[jv.field] = components[jv.field] + term if jv.field in components else term
    logging.debug("euler_lagrange: %d componentes", len(components))
    return SourceForm(sig, components)


def integrate_by_parts(psi: Form) -> Tuple[SourceForm, Form]:
    """
    Descida determinística numa (1,n)-forma: ψ = E + d_H(φ).

    Cada termo g·θ^i_{λ+Λ}∧ω vira −d_λg·θ^i_Λ∧ω − d_H(g·θ^i_Λ∧ω_λ), com λ o
    maior índice de base presente; as variáveis são processadas da maior para
    a menor na ordem canônica.

    Raises:
        ValueError: se ψ tiver termos fora do bigrau (1,n).
    """
    sig = psi.sig
    sign = -1 if sig.n % 2 else 1
    queue = DescentQueue()
    for mono, coeff in psi.items():
        if mono.bidegree != (1, sig.n):
            logging.error("integrate_by_parts com bigrau %s", mono.bidegree)
            raise ValueError(f"integration by parts expects bidegree (1,{sig.n}), got {mono.bidegree}")
        queue.insert(mono.theta_factors[0], coeff * sign)

    components: Dict[int, Expression] = {}
    boundary = Form.zero(sig)
    steps = 0
    while not queue.is_empty():
        jv, g = queue.extract_max()
        if g.is_zero():
            continue
        lam = jv.index.largest()
        if lam is None:
            components[jv.field] = g
            continue
        lower = JetVariable(jv.field, jv.index.remove(lam))
        queue.insert(lower, -total_derivative(g, lam))
        boundary = boundary - Form.theta(sig, lower).wedge(Form.omega_lambda(sig, lam)) * g
        steps += 1
    logging.debug("Descida concluída em %d passos", steps)
    return SourceForm(sig, components), boundary


def first_variational_split(L: Lagrangian) -> VariationalSplit:
    """
    dL = δL + d_H(φ), com φ construída pela descida de integração por partes.

    Para 𝓛 de primeira ordem, φ = −Σ ∂^λ_i𝓛 θ^i∧ω_λ.
    """
    psi = project(dTotal(L.form()), 1)
    el, boundary = integrate_by_parts(psi)
    _check(psi == el.to_form() + dH(boundary), "h_1(dL) != el + d_H(boundary)")
    logging.info("Split variacional: ordem %d, fronteira com %d termos", L.order, len(boundary.terms))
    return VariationalSplit(el, boundary, True)


# --- Noether ----------------------------------------------------------------

def noether(L: Lagrangian, u: VerticalField, bounds: Optional[Bounds] = None) -> SymmetryReport:
    """
    Classifica u como simetria exata, de divergência ou "nenhuma na ordem".

    Verifica sempre a fórmula variacional primeira
    L_{J^∞u}L = u⌟δL + d_H(𝔍_u) e, para simetrias, d_H(current) = −u⌟δL.

    Raises:
        IdentityCheckError: se alguma identidade exata falhar.
    """
    sig = L.sig
    split = first_variational_split(L)
    lie = lie_derivative(u, L.form())
    u_el = contract(u, split.el.to_form())
    noether_current = -contract(u, split.boundary)
    complete = L.is_complete() and u.is_complete()

    _check(lie == u_el + dH(noether_current), "first variational formula")

    sigma: Optional[Form] = None
    used: Optional[Bounds] = None
    if lie.is_zero():
        kind, current = KIND_EXACT, noether_current
    elif not delta_var(lie).is_zero():
        logging.info("L_uL não é variacionalmente trivial: sem simetria")
        kind, current = KIND_NONE, None
    else:
        used = (bounds or Bounds()).resolve(lie) if lie.is_polynomial() else bounds
        sigma = find_horizontal_potential(lie, used)
        if sigma is None:
            kind, current = KIND_NONE, None
            if not lie.is_polynomial():
                complete = False
        else:
            kind, current = KIND_DIVERGENCE, noether_current - sigma

    if current is not None:
        residual = dH(current) + u_el
        _check(residual.is_zero(), "d_H(current) != -u.delta L")
    else:
        residual = Form.zero(sig)
    if not complete:
        logging.warning("Teste de zero incompleto (átomos opacos) na análise de Noether")
    logging.info("Noether: tipo %s", kind)
    return SymmetryReport(kind, lie, sigma, current, noether_current, residual, True, used, complete)


# --- Helmholtz e problema inverso ---------------------------------------------

def vainberg_tonti_lagrangian(E: SourceForm) -> Optional[Lagrangian]:
    """
    𝓛 = ∫_0^1 y^i E_i[t·y] dt no núcleo polinomial.

    Cada monômio de grau d nas variáveis de jato é escalado por 1/(d+1).
    Devolve None se algum E_i não for polinomial.
    """
    sig = E.sig
    if not all(c.is_polynomial() for c in E.components.values()):
        return None
    total = Expression.zero(sig)
    for i, coeff in E.components.items():
        y = Expression.jet(sig, JetVariable(i, MultiIndex.empty(sig.n)))
        jets = [jv.symbol(sig) for jv in coeff.jet_variables()]
        if not jets:
            total = total + y * coeff
            continue
        scaled = sympy.Integer(0)
        for exps, c in sympy.Poly(coeff.expr, *jets).terms():
            monomial = sympy.Mul(*[s ** e for s, e in zip(jets, exps)])
            scaled += sympy.Rational(1, sum(exps) + 1) * c * monomial
        total = total + y * Expression(sig, scaled)
    return Lagrangian(total)


def helmholtz_check(E: SourceForm) -> HelmholtzReport:
    """
    δ(E) = 0 decide se E é localmente variacional (veredito local).

    Quando E é variacional e polinomial, anexa o certificado de
    vainberg_tonti_lagrangian, verificado por euler_lagrange.
    """
    obstruction = delta_var(E.to_form())
    complete = E.is_complete()
    if not obstruction.is_zero():
        logging.info("Helmholtz: obstrução com %d termos", len(obstruction.terms))
        return HelmholtzReport(False, obstruction, None, complete)
    certificate = vainberg_tonti_lagrangian(E)
    if certificate is not None:
        _check(euler_lagrange(certificate) == E, "Lagrangian certificate does not reproduce E")
    logging.info("Helmholtz: variacional")
    return HelmholtzReport(True, None, certificate, complete)


# --- identidades --------------------------------------------------------------

def master_identity_residual(L: Lagrangian, u: VerticalField) -> Form:
    """δ(L_{J^∞u}L) − τ(L_{J^∞u}δL); identicamente nula."""
    lhs = delta_var(lie_derivative(u, L.form()))
    rhs = tau(lie_derivative(u, euler_lagrange(L).to_form()))
    return lhs - rhs


def euler_lagrange_invariance(L: Lagrangian, u: VerticalField) -> InvarianceReport:
    """
    O operador de Euler–Lagrange é invariante por u sse L_{J^∞u}L é
    variacionalmente trivial; os dois lados são calculados e comparados.
    """
    lie_of_source = tau(lie_derivative(u, euler_lagrange(L).to_form()))
    variation_of_lie = delta_var(lie_derivative(u, L.form()))
    _check(lie_of_source == variation_of_lie, "master identity")
    invariant = lie_of_source.is_zero()
    logging.info("Invariância do operador de Euler-Lagrange: %s", invariant)
    return InvarianceReport(invariant, lie_of_source, variation_of_lie, L.is_complete() and u.is_complete())


# --- decomposição ------------------------------------------------------------

def decompose_source(psi: Form, bounds: Optional[Bounds] = None) -> SourceDecomposition:
    """
    ψ = τ(ψ) + d_H(ξ) para ψ de bigrau (k,n), k > 0.

    Para k = 1 o potencial vem da descida (sempre existe); para k >= 2 do
    ansatz limitado, podendo faltar.

    Raises:
        ValueError: se ψ não for homogênea de bigrau (k,n) com k > 0.
    """
    sig = psi.sig
    if psi.is_zero():
        return SourceDecomposition(psi, Form.zero(sig))
    k, s = psi.bidegree()
    if k < 1 or s != sig.n:
        logging.error("decompose_source com bigrau (%d,%d)", k, s)
        raise ValueError(f"decompose_source expects bidegree (k,{sig.n}) with k > 0, got ({k},{s})")

    source = tau(psi)
    complete = psi.is_complete()
    if k == 1:
        el, potential = integrate_by_parts(psi)
        _check(el.to_form() == source, "descent source part != tau(psi)")
        return SourceDecomposition(source, potential, None, complete)

    remainder = psi - source
    used = (bounds or Bounds()).resolve(remainder) if remainder.is_polynomial() else bounds
    potential = find_horizontal_potential(remainder, used)
    if potential is None:
        logging.warning("decompose_source: potencial não encontrado nos limites")
    return SourceDecomposition(source, potential, used, complete)


def is_variationally_trivial(L: Lagrangian) -> bool:
    return euler_lagrange(L).is_zero()
