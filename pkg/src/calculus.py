# src/calculus.py
"""
Operadores do bicomplexo variacional: d_λ, d_H, d_V, d, τ, δ = τ∘d,
prolongamento J^∞u, contração e derivada de Lie.

Todas as somas "infinitas" (derivada total, τ, J^∞u) são truncadas na ordem
efetiva do operando, recalculada a cada chamada: derivadas parciais em
variáveis ausentes são identicamente nulas.
"""

import logging
from fractions import Fraction
from typing import Dict, Mapping, Optional

import sympy

from .expressions import Expression, partial_base
from .forms import Form, MixedForm, WedgeMonomial, interior_theta, project, project_h
from .jets import BundleSignature, JetVariable, MultiIndex


class IdentityCheckError(RuntimeError):
    """Uma identidade exata verificada internamente falhou (indica defeito, não entrada ruim)."""


class VerticalField:
    """
    Campo vertical u = u^i ∂_i, gerador de transformações de calibre.

    Não existem componentes na direção dx por construção. As componentes
    podem ter qualquer ordem de jato finita.
    """

    __slots__ = ("sig", "components")

    def __init__(self, sig: BundleSignature, components: Optional[Mapping[int, Expression]] = None):
        self.sig = sig
        clean: Dict[int, Expression] = {}
        for i, coeff in sorted((components or {}).items()):
            if not 0 <= i < sig.m:
                raise ValueError(f"fiber index out of range: {i}")
            if coeff.sig != sig:
                raise ValueError("Componente com assinatura diferente do campo")
            if not coeff.is_zero():
                clean[i] = coeff
        self.components = clean

    def component(self, i: int) -> Expression:
        return self.components.get(i, Expression.zero(self.sig))

    def is_zero(self) -> bool:
        return not self.components

    def is_complete(self) -> bool:
        return all(c.is_complete() for c in self.components.values())

    @property
    def order(self) -> int:
        return max((c.order for c in self.components.values()), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VerticalField):
            return NotImplemented
        return self.sig == other.sig and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.sig, tuple(self.components.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{self.sig.fiber_names[i]}: {c.expr}" for i, c in self.components.items())
        return f"VerticalField({{{inner}}})"


# --- derivadas totais -------------------------------------------------------

def total_derivative(f: Expression, lam: int) -> Expression:
    """
    d_λ f = ∂_λ f + Σ y^i_{λ+Λ} ∂_i^Λ f, somando só sobre os jatos presentes em f.
    """
    sig = f.sig
    terms = [partial_base(f, lam).expr]
    for jv in f.jet_variables():
        terms.append(jv.shifted(lam).symbol(sig) * sympy.diff(f.expr, jv.symbol(sig)))
    return Expression(sig, sympy.Add(*terms))


def total_derivative_iter(f: Expression, index: MultiIndex) -> Expression:
    """d_Λ = d_{λ_k}···d_{λ_1} (a ordem não importa: as derivadas comutam)."""
    for lam in index.indices():
        f = total_derivative(f, lam)
    return f


def total_derivative_form(phi: Form, lam: int) -> Form:
    """d_λ numa forma: derivação de grau 0 com d_λθ^i_Λ = θ^i_{λ+Λ} e d_λdx^μ = 0."""
    sig = phi.sig
    out: Dict[WedgeMonomial, Expression] = {}

    def accumulate(mono: WedgeMonomial, value: Expression) -> None:
        out[mono] = out[mono] + value if mono in out else value

    for mono, coeff in phi.items():
        accumulate(mono, total_derivative(coeff, lam))
        for pos, jv in enumerate(mono.theta_factors):
            thetas = list(mono.theta_factors)
            thetas[pos] = jv.shifted(lam)
            sign, shifted = WedgeMonomial.build(
                [("dx", mu) for mu in mono.dx_factors] + [("jet", t) for t in thetas]
            )
            if shifted is not None:
                accumulate(shifted, coeff * sign)
    return Form(sig, out)


def total_derivative_form_iter(phi: Form, index: MultiIndex) -> Form:
    for lam in index.indices():
        phi = total_derivative_form(phi, lam)
    return phi


# --- diferenciais -----------------------------------------------------------

def dH(phi: Form) -> Form:
    """d_H(φ) = dx^λ ∧ d_λ(φ); leva (k,s) em (k,s+1)."""
    sig = phi.sig
    out = Form.zero(sig)
    for lam in range(sig.n):
        out = out + Form.dx(sig, lam).wedge(total_derivative_form(phi, lam))
    return out


def dV(phi: Form) -> Form:
    """d_V(φ) = θ^i_Λ ∧ ∂^Λ_i φ; leva (k,s) em (k+1,s)."""
    sig = phi.sig
    out = Form.zero(sig)
    for mono, coeff in phi.items():
        body = Form(sig, {mono: Expression.one(sig)})
        for jv in coeff.jet_variables():
            out = out + Form.theta(sig, jv).wedge(body) * coeff.diff_jet(jv)
    return out


def dTotal(phi: Form) -> Form:
    """d = d_H + d_V."""
    return dH(phi) + dV(phi)


def exterior_derivative(phi: MixedForm) -> MixedForm:
    """d na base ingênua {dx, dy}: d(c·m) = ∂_λc dx^λ∧m + ∂_i^Λc dy^i_Λ∧m."""
    sig = phi.sig
    out = MixedForm.zero(sig)
    for mono, coeff in phi.items():
        body = MixedForm(sig, {mono: Expression.one(sig)})
        for lam in range(sig.n):
            out = out + MixedForm.dx(sig, lam).wedge(body) * partial_base(coeff, lam)
        for jv in coeff.jet_variables():
            out = out + MixedForm.dy(sig, jv).wedge(body) * coeff.diff_jet(jv)
    return out


# --- operador de Euler interior ----------------------------------------------

def tau_bar(phi: Form) -> Form:
    """
    τ̄(φ) = Σ_Λ (−1)^{|Λ|} θ^i ∧ d_Λ(∂^Λ_i ⌟ φ), para φ de bigrau (k,n), k >= 1.

    Raises:
        ValueError: se φ não for homogênea de bigrau (k,n) com k >= 1.
    """
    sig = phi.sig
    if phi.is_zero():
        return Form.zero(sig)
    for mono in phi.terms:
        if mono.k < 1 or mono.s != sig.n:
            logging.error("tau_bar com bigrau inválido: %s", mono.bidegree)
            raise ValueError(f"tau_bar expects bidegree (k,n) with k >= 1, got {mono.bidegree}")
    ks = {mono.k for mono in phi.terms}
    if len(ks) > 1:
        raise ValueError(f"tau_bar expects a homogeneous form, got contact degrees {sorted(ks)}")

    present = sorted({jv for mono in phi.terms for jv in mono.theta_factors})
    out = Form.zero(sig)
    for jv in present:
        inner = total_derivative_form_iter(interior_theta(phi, jv), jv.index)
        lead = Form.theta(sig, JetVariable(jv.field, MultiIndex.empty(sig.n)))
        term = lead.wedge(inner)
        out = out + (-term if jv.order % 2 else term)
    return out


def tau(phi: Form) -> Form:
    """
    τ = Σ_{k>0} (1/k) τ̄∘h_k∘h^n.

    Projeção sobre as formas-fonte; anula grau horizontal < n e grau de contato 0.
    """
    sig = phi.sig
    top = project_h(phi, sig.n)
    out = Form.zero(sig)
    for k in sorted({mono.k for mono in top.terms if mono.k > 0}):
        out = out + tau_bar(project(top, k)) * Fraction(1, k)
    return out


def delta_var(phi: Form) -> Form:
    """
    δ = τ∘d em formas de bigrau (k,n). Em (0,n) é o operador de Euler–Lagrange,
    em (1,n) é o operador de Helmholtz–Sonin.

    Raises:
        ValueError: se algum termo não tiver grau horizontal n.
    """
    sig = phi.sig
    for mono in phi.terms:
        if mono.s != sig.n:
            logging.error("delta_var com grau horizontal %d (n=%d)", mono.s, sig.n)
            raise ValueError(f"delta_var expects horizontal degree n={sig.n}, got bidegree {mono.bidegree}")
    return tau(dTotal(phi))


# --- campos verticais ---------------------------------------------------------

def prolong_apply(u: VerticalField, f: Expression) -> Expression:
    """J^∞u(f) = Σ d_Λu^i ∂_i^Λ f, sobre as variáveis de jato presentes em f."""
    sig = f.sig
    terms = []
    for jv in f.jet_variables():
        ui = u.component(jv.field)
        if ui.is_zero():
            continue
        terms.append(total_derivative_iter(ui, jv.index).expr * sympy.diff(f.expr, jv.symbol(sig)))
    return Expression(sig, sympy.Add(*terms))


def contract(u: VerticalField, phi: Form) -> Form:
    """
    J^∞u ⌟ φ, antiderivação com J^∞u⌟dx^λ = 0 e J^∞u⌟θ^i_Λ = d_Λu^i.

    Leva (k,s) em (k−1,s).
    """
    sig = phi.sig
    present = sorted({jv for mono in phi.terms for jv in mono.theta_factors})
    out = Form.zero(sig)
    for jv in present:
        ui = u.component(jv.field)
        if ui.is_zero():
            continue
        out = out + interior_theta(phi, jv) * total_derivative_iter(ui, jv.index)
    return out


def lie_derivative(u: VerticalField, phi: Form) -> Form:
    """L_{J^∞u}φ = J^∞u ⌟ dφ + d(J^∞u ⌟ φ)."""
    return contract(u, dTotal(phi)) + dTotal(contract(u, phi))
