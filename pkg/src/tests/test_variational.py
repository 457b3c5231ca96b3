# src/tests/test_variational.py
"""
Testes dos algoritmos variacionais.

Regressões clássicas (onda, viga, rotação, boost de Galileu) comparadas com
oráculos derivados à mão, e identidades exatas sobre o corpus aleatório:
concordância das rotas para Euler-Lagrange, fórmula variacional primeira,
identidade mestra, Helmholtz e decomposição.
"""

import random

import pytest
from conftest import corpus

from src.calculus import VerticalField, contract, dH, dTotal, delta_var, lie_derivative, tau
from src.expressions import Expression
from src.forms import Form, SourceForm, project
from src.grammar import parse_expression
from src.jets import BundleSignature
from src.potential import Bounds, form_degree
from src.utils import random_form, random_lagrangian, random_signature, random_vertical_field
from src.variational import (
    KIND_DIVERGENCE,
    KIND_EXACT,
    KIND_NONE,
    Lagrangian,
    decompose_source,
    euler_lagrange,
    euler_lagrange_invariance,
    first_variational_split,
    helmholtz_check,
    integrate_by_parts,
    is_variationally_trivial,
    master_identity_residual,
    noether,
    vainberg_tonti_lagrangian,
)

SIG = BundleSignature(("x",), ("y",))
WAVE = BundleSignature(("t", "x"), ("u",))
ROTATION = BundleSignature(("x",), ("u", "v"))


def e(text: str, sig: BundleSignature = SIG) -> Expression:
    return parse_expression(text, sig)


def lag(text: str, sig: BundleSignature = SIG) -> Lagrangian:
    return Lagrangian(e(text, sig))


def source(text: str, sig: BundleSignature = SIG) -> SourceForm:
    return SourceForm(sig, {0: e(text, sig)})


def field(sig: BundleSignature = SIG, **components) -> VerticalField:
    return VerticalField(sig, {sig.fiber_index(k): e(v, sig) for k, v in components.items()})


def theta(sig: BundleSignature = SIG, name: str = "y", *bases) -> Form:
    return Form.theta(sig, sig.jet(name, *bases))


class TestEulerLagrange:
    """δL pela expansão direta."""

    def test_examples(self):
        assert euler_lagrange(lag("y")) == source("1")
        assert euler_lagrange(lag("1/2*y[x]^2")) == source("-y[x,x]")

    def test_wave_equation(self):
        E = euler_lagrange(lag("1/2*(u[t]^2 - u[x]^2)", WAVE))
        assert E == source("-u[t,t] + u[x,x]", WAVE), f"Equação da onda inesperada: {E}"

    def test_beam(self):
        assert euler_lagrange(lag("1/2*y[x,x]^2")) == source("y[x,x,x,x]")

    def test_two_fields(self):
        E = euler_lagrange(lag("1/2*(u[x]^2 + v[x]^2) + u*v", ROTATION))
        assert E.component(0) == e("-u[x,x] + v", ROTATION)
        assert E.component(1) == e("-v[x,x] + u", ROTATION)

    def test_opaque_potential(self):
        E = euler_lagrange(lag("1/2*y[x]^2 + cos(y)"))
        assert E == source("-y[x,x] - sin(y)")
        assert not E.is_complete()

    @pytest.mark.parametrize("seed", corpus())
    def test_route_agreement(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        L = random_lagrangian(rng, sig)
        assert euler_lagrange(L).to_form() == delta_var(L.form()), f"euler_lagrange != τ∘d (seed {seed})"


class TestFirstVariationalSplit:
    """h_1(dL) = δL + d_H(φ) com φ da descida."""

    def test_free_field(self):
        split = first_variational_split(lag("1/2*y[x]^2"))
        assert split.el == source("-y[x,x]")
        assert split.boundary == theta() * e("-y[x]")
        assert split.residual_checked

    def test_no_derivatives(self):
        split = first_variational_split(lag("y"))
        assert split.el == source("1")
        assert split.boundary.is_zero()

    def test_beam(self):
        split = first_variational_split(lag("1/2*y[x,x]^2"))
        assert split.el == source("y[x,x,x,x]")
        expected = theta(SIG, "y", "x") * e("-y[x,x]") + theta() * e("y[x,x,x]")
        assert split.boundary == expected

    def test_first_order_boundary_two_dimensions(self):
        split = first_variational_split(lag("1/2*(u[t]^2 - u[x]^2)", WAVE))
        u = theta(WAVE, "u")
        # φ = −Σ ∂^λ𝓛 θ∧ω_λ, ω_t = dx, ω_x = −dt
        expected = (u.wedge(Form.omega_lambda(WAVE, 0)) * e("-u[t]", WAVE)
                    + u.wedge(Form.omega_lambda(WAVE, 1)) * e("u[x]", WAVE))
        assert split.boundary == expected

    def test_integrate_by_parts_bidegree(self):
        with pytest.raises(ValueError):
            integrate_by_parts(Form.omega(SIG, e("y")))

    @pytest.mark.parametrize("seed", corpus(100))
    def test_split_identity(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        L = random_lagrangian(rng, sig)
        split = first_variational_split(L)
        psi = project(dTotal(L.form()), 1)
        assert psi - split.el.to_form() - dH(split.boundary) == Form.zero(sig)

    @pytest.mark.parametrize("seed", corpus(100))
    def test_first_variational_formula(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        L = random_lagrangian(rng, sig)
        u = random_vertical_field(rng, sig, max_order=1)
        split = first_variational_split(L)
        residual = (lie_derivative(u, L.form()) - contract(u, split.el.to_form())
                    + dH(contract(u, split.boundary)))
        assert residual.is_zero(), f"Fórmula variacional primeira falhou (seed {seed})"


class TestNoether:
    """Classificação de simetrias e correntes conservadas."""

    def test_rotation_exact(self):
        L = lag("1/2*(u[x]^2 + v[x]^2)", ROTATION)
        X = field(ROTATION, u="-v", v="u")
        report = noether(L, X)
        assert report.kind == KIND_EXACT
        assert report.lie.is_zero()
        assert report.sigma is None
        assert report.current == Form.scalar(e("u*v[x] - v*u[x]", ROTATION))
        assert report.residual.is_zero() and report.onshell_identity_checked
        # d_x𝔍 = −[(−v)(−u_xx) + u(−v_xx)]
        assert dH(report.current) == Form.omega(ROTATION, e("-(v*u[x,x] - u*v[x,x])", ROTATION))

    def test_translation_exact(self):
        report = noether(lag("1/2*y[x]^2"), field(y="1"))
        assert report.kind == KIND_EXACT
        assert report.current == Form.scalar(e("y[x]"))
        el = euler_lagrange(lag("1/2*y[x]^2"))
        assert dH(report.current) == -contract(field(y="1"), el.to_form())

    def test_scaling_is_not_a_symmetry(self):
        report = noether(lag("1/2*y[x]^2"), field(y="y"))
        assert report.kind == KIND_NONE
        assert report.lie == Form.omega(SIG, e("y[x]^2"))
        assert report.current is None
        assert delta_var(report.lie) == SourceForm(SIG, {0: e("-2*y[x,x]")}).to_form()

    def test_galilean_boost_divergence(self):
        sig = BundleSignature(("t",), ("y",))
        report = noether(lag("1/2*y[t]^2", sig), field(sig, y="t"))
        assert report.kind == KIND_DIVERGENCE
        assert report.lie == Form.omega(sig, e("y[t]", sig))
        assert report.sigma == Form.scalar(e("y", sig))
        assert report.current == Form.scalar(e("t*y[t] - y", sig))
        assert dH(report.sigma) == report.lie
        assert report.bounds_used == Bounds(2, 1)

    def test_wave_time_translation_divergence(self, sig_wave):
        L = lag("1/2*(u[t]^2 - u[x]^2)", sig_wave)
        report = noether(L, field(sig_wave, u="u[t]"))
        assert report.kind == KIND_DIVERGENCE
        assert dH(report.sigma) == report.lie
        assert report.sigma == Form.dx(sig_wave, 1) * e("1/2*(u[t]^2 - u[x]^2)", sig_wave)
        assert report.current.order == 1, f"Corrente de ordem {report.current.order}"
        assert report.residual.is_zero()

    def test_beam_linear_field(self):
        report = noether(lag("1/2*y[x,x]^2"), field(y="x"))
        assert report.kind == KIND_EXACT
        assert report.current == Form.scalar(e("y[x,x] - x*y[x,x,x]"))

    def test_completeness_flag(self):
        report = noether(lag("1/2*y[x]^2 + cos(y)"), field(y="1"))
        assert report.kind == KIND_NONE
        assert not report.complete

    def test_deterministic(self):
        L, u = lag("1/2*y[x]^2 + x*y*y[x]"), field(y="x*y[x]")
        assert noether(L, u) == noether(L, u)

    @pytest.mark.parametrize("seed", corpus(25))
    def test_off_shell_conservation(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        L = random_lagrangian(rng, sig)
        u = random_vertical_field(rng, sig, max_order=1)
        report = noether(L, u)
        if report.kind != KIND_NONE:
            el = euler_lagrange(L).to_form()
            assert (dH(report.current) + contract(u, el)).is_zero()


class TestMasterIdentity:
    """δ(L_uL) − τ(L_uδL) = 0."""

    def test_examples(self):
        assert master_identity_residual(lag("1/2*y[x]^2"), field(y="y")).is_zero()
        assert master_identity_residual(lag("x*y*y[x,x]^3"), VerticalField(SIG)).is_zero()

    @pytest.mark.parametrize("seed", corpus(100))
    def test_random_pairs(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng, max_m=2)
        L = random_lagrangian(rng, sig)
        vanishing = [0] if sig.m > 1 and seed % 2 else []
        u = random_vertical_field(rng, sig, max_order=2, vanishing=vanishing)
        assert master_identity_residual(L, u).is_zero(), f"Identidade mestra falhou (seed {seed})"

    def test_invariance_rotation(self):
        report = euler_lagrange_invariance(lag("1/2*(u[x]^2 + v[x]^2)", ROTATION), field(ROTATION, u="-v", v="u"))
        assert report.invariant
        assert report.lie_of_source.is_zero()

    def test_invariance_fails_for_scaling(self):
        report = euler_lagrange_invariance(lag("1/2*y[x]^2"), field(y="y"))
        assert not report.invariant
        assert report.lie_of_source == report.variation_of_lie
        assert report.lie_of_source == SourceForm(SIG, {0: e("-2*y[x,x]")}).to_form()

    def test_invariance_of_divergence_symmetry(self):
        sig = BundleSignature(("t",), ("y",))
        report = euler_lagrange_invariance(lag("1/2*y[t]^2", sig), field(sig, y="t"))
        assert report.invariant


class TestHelmholtz:
    """δ(E) = 0 e o certificado Lagrangiano."""

    def test_advection_not_variational(self):
        report = helmholtz_check(source("y[x]"))
        assert not report.variational
        assert report.obstruction is not None and not report.obstruction.is_zero()
        assert report.certificate is None

    def test_second_derivative_variational(self):
        E = source("y[x,x]")
        report = helmholtz_check(E)
        assert report.variational and report.obstruction is None
        assert euler_lagrange(report.certificate) == E
        assert euler_lagrange(lag("-1/2*y[x]^2")) == E
        difference = Lagrangian(report.certificate.density - e("-1/2*y[x]^2"))
        assert is_variationally_trivial(difference)

    def test_vainberg_tonti_scaling(self):
        assert vainberg_tonti_lagrangian(source("y[x,x]")).density == e("1/2*y*y[x,x]")
        assert vainberg_tonti_lagrangian(source("x")).density == e("x*y")
        assert vainberg_tonti_lagrangian(source("sin(y)")) is None

    def test_non_polynomial_variational_without_certificate(self):
        report = helmholtz_check(source("sin(y)"))
        assert report.variational
        assert report.certificate is None
        assert not report.complete

    @pytest.mark.parametrize("seed", corpus(50))
    def test_euler_lagrange_is_variational(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        E = euler_lagrange(random_lagrangian(rng, sig))
        report = helmholtz_check(E)
        assert report.variational, f"δ(δL) != 0 (seed {seed})"
        if report.certificate is not None:
            assert euler_lagrange(report.certificate) == E


class TestDecomposition:
    """ψ = τ(ψ) + d_H(ξ)."""

    def test_source_form_is_fixed(self):
        psi = theta().wedge(Form.omega(SIG))
        result = decompose_source(psi)
        assert result.source == psi
        assert result.potential.is_zero()

    def test_first_order_term(self):
        psi = theta(SIG, "y", "x").wedge(Form.omega(SIG)) * e("y")
        result = decompose_source(psi)
        assert result.source == SourceForm(SIG, {0: e("-y[x]")}).to_form()
        assert result.potential == theta() * e("-y")
        assert dH(result.potential) == psi - result.source

    def test_wrong_bidegree(self):
        with pytest.raises(ValueError):
            decompose_source(Form.omega(SIG, e("y")))
        with pytest.raises(ValueError):
            decompose_source(theta() * e("y"))

    @pytest.mark.parametrize("seed", corpus(15))
    def test_exact_forms_have_no_source(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng, max_n=1)
        k = rng.randint(1, 2)
        xi = random_form(rng, sig, k, sig.n - 1, max_degree=2)
        psi = dH(xi)
        bounds = Bounds(max(xi.order, 1), max(form_degree(xi), 1))
        result = decompose_source(psi, bounds)
        assert result.source.is_zero()
        assert result.potential is not None, f"Potencial não encontrado (seed {seed})"
        assert dH(result.potential) == psi

    @pytest.mark.parametrize("seed", corpus(25))
    def test_contact_degree_one_always_decomposes(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        psi = random_form(rng, sig, 1, sig.n)
        result = decompose_source(psi)
        assert result.source == tau(psi)
        assert dH(result.potential) == psi - result.source


class TestTriviality:

    def test_examples(self):
        assert is_variationally_trivial(lag("y[x]"))
        assert not is_variationally_trivial(lag("1/2*y[x]^2"))
        assert is_variationally_trivial(lag("u[x]*u[t] - u[t]*u[x]", WAVE))
