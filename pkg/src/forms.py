# src/forms.py
"""
Álgebra graduada de formas no espaço de jatos, na base de contato {dx^λ, θ^i_Λ}.

Cada monômio é guardado com os fatores ordenados (bloco dx primeiro, depois o
bloco θ na ordem canônica das variáveis de jato) e o sinal da permutação vai
para o coeficiente. Qualquer caminho de construção produz o mesmo monômio.

A base "mista" {dx^λ, dy^i_Λ} (MixedForm) existe só na fronteira: entrada de
formas e o operador d calculado pela rota ingênua.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .expressions import Expression, _to_sympy_scalar
from .jets import BundleSignature, JetVariable, MultiIndex

# Gerador: ("dx", λ) ou ("jet", JetVariable); "jet" é θ em Form e dy em MixedForm.
Generator = Tuple[str, object]


def _generator_key(gen: Generator):
    kind, value = gen
    if kind == "dx":
        return (0, value)
    return (1, value.sort_key())


def canonical_order(factors: Sequence[Generator]) -> Tuple[int, Optional[Tuple[Generator, ...]]]:
    """
    Ordena fatores de grau 1 e devolve (sinal, fatores ordenados).

    Um fator repetido anula o produto: devolve (0, None).
    """
    keys = [_generator_key(g) for g in factors]
    if len(set(keys)) != len(keys):
        return 0, None
    inversions = 0
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            if keys[a] > keys[b]:
                inversions += 1
    ordered = tuple(g for _, g in sorted(zip(keys, factors), key=lambda pair: pair[0]))
    return (-1 if inversions % 2 else 1), ordered


@dataclass(frozen=True)
class WedgeMonomial:
    """
    dx^{λ_1}∧…∧dx^{λ_s}∧θ^{i_1}_{Λ_1}∧…∧θ^{i_k}_{Λ_k}, fatores estritamente crescentes.
    """

    dx_factors: Tuple[int, ...] = ()
    theta_factors: Tuple[JetVariable, ...] = ()

    @property
    def k(self) -> int:
        return len(self.theta_factors)

    @property
    def s(self) -> int:
        return len(self.dx_factors)

    @property
    def bidegree(self) -> Tuple[int, int]:
        return (self.k, self.s)

    @property
    def degree(self) -> int:
        return self.k + self.s

    def factors(self) -> Tuple[Generator, ...]:
        return tuple(("dx", lam) for lam in self.dx_factors) + tuple(("jet", jv) for jv in self.theta_factors)

    def sort_key(self):
        return (self.k, self.s, self.dx_factors, tuple(jv.sort_key() for jv in self.theta_factors))

    @classmethod
    def build(cls, factors: Sequence[Generator]) -> Tuple[int, Optional["WedgeMonomial"]]:
        sign, ordered = canonical_order(factors)
        if ordered is None:
            return 0, None
        dx = tuple(v for kind, v in ordered if kind == "dx")
        jets = tuple(v for kind, v in ordered if kind == "jet")
        return sign, cls(dx, jets)

    def times(self, other: "WedgeMonomial") -> Tuple[int, Optional["WedgeMonomial"]]:
        return WedgeMonomial.build(self.factors() + other.factors())

    def order(self) -> int:
        return max((jv.order for jv in self.theta_factors), default=0)


class _FormBase:
    """Soma finita Σ coeficiente·monômio; coeficientes nulos são descartados."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: BundleSignature, terms: Optional[Mapping[WedgeMonomial, Expression]] = None):
        self.sig = sig
        clean: Dict[WedgeMonomial, Expression] = {}
        for mono, coeff in (terms or {}).items():
            if coeff.sig != sig:
                raise ValueError("Coeficiente com assinatura diferente da forma")
            if len(mono.dx_factors) > sig.n:
                raise ValueError(f"Grau horizontal {len(mono.dx_factors)} excede n={sig.n}")
            if not coeff.is_zero():
                clean[mono] = coeff
        self.terms = dict(sorted(clean.items(), key=lambda item: item[0].sort_key()))

    # --- construção ----------------------------------------------------

    @classmethod
    def zero(cls, sig: BundleSignature):
        return cls(sig)

    @classmethod
    def scalar(cls, coeff: Expression):
        return cls(coeff.sig, {WedgeMonomial(): coeff})

    @classmethod
    def monomial(cls, coeff: Expression, factors: Sequence[Generator]):
        sign, mono = WedgeMonomial.build(factors)
        if mono is None:
            return cls(coeff.sig)
        return cls(coeff.sig, {mono: coeff * sign})

    @classmethod
    def dx(cls, sig: BundleSignature, lam: int):
        sig._check_base(lam)
        return cls(sig, {WedgeMonomial((lam,), ()): Expression.one(sig)})

    @classmethod
    def omega(cls, sig: BundleSignature, coeff: Optional[Expression] = None):
        """ω = dx^1∧…∧dx^n (vezes coeff)."""
        return cls(sig, {WedgeMonomial(tuple(range(sig.n)), ()): coeff if coeff is not None else Expression.one(sig)})

    @classmethod
    def omega_lambda(cls, sig: BundleSignature, lam: int):
        """ω_λ = ∂_λ ⌟ ω."""
        sig._check_base(lam)
        rest = tuple(mu for mu in range(sig.n) if mu != lam)
        sign = -1 if lam % 2 else 1
        return cls(sig, {WedgeMonomial(rest, ()): Expression.constant(sig, sign)})

    # --- aritmética ----------------------------------------------------

    def _check_same(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"Não é possível combinar {type(self).__name__} com {type(other).__name__}")
        if other.sig != self.sig:
            raise ValueError("Formas de assinaturas diferentes")

    def __add__(self, other):
        self._check_same(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms[mono] + coeff if mono in terms else coeff
        return type(self)(self.sig, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(self.sig, {mono: -coeff for mono, coeff in self.terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, _FormBase):
            return NotImplemented
        if not isinstance(scalar, Expression):
            scalar = Expression(self.sig, _to_sympy_scalar(scalar), canonical=True)
        return type(self)(self.sig, {mono: coeff * scalar for mono, coeff in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other):
        """Produto exterior graduado-comutativo."""
        self._check_same(other)
        out: Dict[WedgeMonomial, Expression] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = m1.times(m2)
                if mono is None:
                    continue
                value = c1 * c2 * sign
                out[mono] = out[mono] + value if mono in out else value
        return type(self)(self.sig, out)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.sig, tuple(self.terms.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{mono}: {coeff.expr}" for mono, coeff in self.terms.items())
        return f"{type(self).__name__}({{{inner}}})"

    # --- consultas -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[Tuple[WedgeMonomial, Expression]]:
        return iter(self.terms.items())

    def bidegrees(self) -> Set[Tuple[int, int]]:
        return {mono.bidegree for mono in self.terms}

    def bidegree(self) -> Optional[Tuple[int, int]]:
        """Bigrau único da forma (None para a forma nula)."""
        degrees = self.bidegrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError(f"Forma não homogênea: bigraus {sorted(degrees)}")
        return next(iter(degrees))

    def is_complete(self) -> bool:
        return all(coeff.is_complete() for coeff in self.terms.values())

    def is_polynomial(self) -> bool:
        return all(coeff.is_polynomial() for coeff in self.terms.values())

    @property
    def order(self) -> int:
        return max((max(c.order, m.order()) for m, c in self.terms.items()), default=0)

    def map_coefficients(self, fn):
        return type(self)(self.sig, {mono: fn(coeff) for mono, coeff in self.terms.items()})

    def coefficient(self, mono: WedgeMonomial) -> Expression:
        return self.terms.get(mono, Expression.zero(self.sig))


class Form(_FormBase):
    """Elemento de O*_∞ na base de contato."""

    __slots__ = ()

    @classmethod
    def theta(cls, sig: BundleSignature, jv: JetVariable):
        return cls(sig, {WedgeMonomial((), (jv,)): Expression.one(sig)})


class MixedForm(_FormBase):
    """Forma na base ingênua {dx^λ, dy^i_Λ}; os fatores de jato são dy."""

    __slots__ = ()

    @classmethod
    def dy(cls, sig: BundleSignature, jv: JetVariable):
        return cls(sig, {WedgeMonomial((), (jv,)): Expression.one(sig)})


def wedge(a: _FormBase, b: _FormBase) -> _FormBase:
    return a.wedge(b)


def _rewrite(phi: _FormBase, target, image) -> _FormBase:
    """Reescreve cada fator de jato por image(jv) e cada dx por target.dx."""
    sig = phi.sig
    out = target.zero(sig)
    for mono, coeff in phi.items():
        acc = target.scalar(coeff)
        for kind, value in mono.factors():
            factor = target.dx(sig, value) if kind == "dx" else image(value)
            acc = acc.wedge(factor)
        out = out + acc
    return out


def to_contact_basis(phi: MixedForm) -> Form:
    """Substitui dy^i_Λ = θ^i_Λ + Σ_λ y^i_{λ+Λ} dx^λ."""
    if not isinstance(phi, MixedForm):
        raise TypeError("to_contact_basis espera uma MixedForm")
    sig = phi.sig

    def image(jv: JetVariable) -> Form:
        out = Form.theta(sig, jv)
        for lam in range(sig.n):
            out = out + Form.dx(sig, lam) * Expression.jet(sig, jv.shifted(lam))
        return out

    return _rewrite(phi, Form, image)


def from_contact_basis(phi: Form) -> MixedForm:
    """Substitui θ^i_Λ = dy^i_Λ − Σ_λ y^i_{λ+Λ} dx^λ (inversa de to_contact_basis)."""
    if not isinstance(phi, Form):
        raise TypeError("from_contact_basis espera uma Form")
    sig = phi.sig

    def image(jv: JetVariable) -> MixedForm:
        out = MixedForm.dy(sig, jv)
        for lam in range(sig.n):
            out = out - MixedForm.dx(sig, lam) * Expression.jet(sig, jv.shifted(lam))
        return out

    return _rewrite(phi, MixedForm, image)


def project(phi: Form, k: int) -> Form:
    """h_k: termos de grau de contato k."""
    return Form(phi.sig, {m: c for m, c in phi.items() if m.k == k})


def project_h(phi: Form, s: int) -> Form:
    """h^s: termos de grau horizontal s."""
    return Form(phi.sig, {m: c for m, c in phi.items() if m.s == s})


def h0(phi: Union[Form, MixedForm], horizontal_degree: Optional[int] = None) -> Form:
    """
    Projeção horizontal h_0 (descarta a parte de contato).

    Para formas de grau n coincide com h_0∘h^n; `horizontal_degree` compõe
    explicitamente com h^s.
    """
    if isinstance(phi, MixedForm):
        phi = to_contact_basis(phi)
    out = project(phi, 0)
    if horizontal_degree is not None:
        out = project_h(out, horizontal_degree)
    return out


def form_equal(a: _FormBase, b: _FormBase) -> bool:
    return a == b


def interior_theta(phi: Form, jv: JetVariable) -> Form:
    """
    ∂^Λ_i ⌟ φ: contração com o vetor coordenado dual a θ^i_Λ.

    Remove o fator θ^i_Λ com o sinal de levá-lo para a frente:

        ι(dx∧θ)  = −dx         ι(θ∧θ') = θ'
        ι(θ'∧θ)  = −θ'         ι(dx∧dx'∧θ) = dx∧dx'
    """
    out: Dict[WedgeMonomial, Expression] = {}
    for mono, coeff in phi.items():
        if jv not in mono.theta_factors:
            continue
        pos = mono.s + mono.theta_factors.index(jv)
        rest = WedgeMonomial(mono.dx_factors, tuple(t for t in mono.theta_factors if t != jv))
        out[rest] = coeff * (-1 if pos % 2 else 1)
    return Form(phi.sig, out)


class SourceForm:
    """
    Σ E_i θ^i ∧ ω: a forma de um operador de Euler–Lagrange.

    Args:
        sig: assinatura
        components: {índice do campo: E_i}; componentes nulas são descartadas
    """

    __slots__ = ("sig", "components")

    def __init__(self, sig: BundleSignature, components: Optional[Mapping[int, Expression]] = None):
        self.sig = sig
        clean = {}
        for i, coeff in sorted((components or {}).items()):
            if not 0 <= i < sig.m:
                raise ValueError(f"fiber index out of range: {i}")
            if not coeff.is_zero():
                clean[i] = coeff
        self.components: Dict[int, Expression] = clean

    def component(self, i: int) -> Expression:
        return self.components.get(i, Expression.zero(self.sig))

    def is_zero(self) -> bool:
        return not self.components

    def is_complete(self) -> bool:
        return all(c.is_complete() for c in self.components.values())

    @property
    def order(self) -> int:
        return max((c.order for c in self.components.values()), default=0)

    def to_form(self) -> Form:
        sig = self.sig
        out = Form.zero(sig)
        omega = Form.omega(sig)
        for i, coeff in self.components.items():
            theta = Form.theta(sig, JetVariable(i, MultiIndex.empty(sig.n)))
            out = out + theta.wedge(omega) * coeff
        return out

    @classmethod
    def from_form(cls, phi: Form) -> "SourceForm":
        """
        Lê uma (1,n)-forma cujos fatores θ são todos de ordem zero.

        Raises:
            ValueError: se a forma não tiver essa forma.
        """
        sig = phi.sig
        sign = -1 if sig.n % 2 else 1
        components: Dict[int, Expression] = {}
        for mono, coeff in phi.items():
            if mono.bidegree != (1, sig.n) or mono.theta_factors[0].order != 0:
                raise ValueError(f"Termo fora do formato de forma-fonte: {mono}")
            components[mono.theta_factors[0].field] = coeff * sign
        return cls(sig, components)

    @staticmethod
    def is_source_shape(phi: Form) -> bool:
        return all(m.bidegree == (1, phi.sig.n) and m.theta_factors[0].order == 0 for m in phi.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SourceForm):
            return NotImplemented
        return self.sig == other.sig and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.sig, tuple(self.components.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{self.sig.fiber_names[i]}: {c.expr}" for i, c in self.components.items())
        return f"SourceForm({{{inner}}})"
