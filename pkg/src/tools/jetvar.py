import argparse
import logging
import os
import sys
from typing import List, Optional

from src.calculus import IdentityCheckError, dTotal, lie_derivative
from src.forms import project
from src.grammar import ParseError
from src.model import ModelFile, load_model
from src.potential import Bounds, find_horizontal_potential
from src.render import FORMATS, Report, render
from src.variational import (
    KIND_NONE,
    Lagrangian,
    decompose_source,
    euler_lagrange,
    euler_lagrange_invariance,
    first_variational_split,
    helmholtz_check,
    is_variationally_trivial,
    master_identity_residual,
    noether,
)

COMMANDS = ("el", "split", "noether", "lie", "trivial", "helmholtz", "master-check",
            "decompose", "potential", "invariance", "inverse")
FORMAT_ENV = "JETVAR_FORMAT"
LOG_LEVEL_ENV = "JETVAR_LOG_LEVEL"

EXIT_OK = 0
EXIT_USER_ERROR = 2
EXIT_IDENTITY_FAILURE = 3


class UserError(ValueError):
    """Nome inexistente, argumento ausente ou configuração inválida."""


class Selection:
    """Lagrangiana, simetria e fonte escolhidas para um comando."""

    def __init__(self, model: ModelFile, names: List[str], lagrangian: Optional[str],
                 symmetry: Optional[str], source: Optional[str]):
        self.model = model
        self.lagrangian_name = lagrangian
        self.symmetry_name = symmetry
        self.source_name = source
        for name in names:
            if name in model.lagrangians:
                self.lagrangian_name = self.lagrangian_name or name
            elif name in model.symmetries:
                self.symmetry_name = self.symmetry_name or name
            elif name in model.sources:
                self.source_name = self.source_name or name
            else:
                raise UserError(f"unknown name {name}")

    def _pick(self, kind: str, table: dict, name: Optional[str]) -> str:
        if name is None:
            if len(table) == 1:
                return next(iter(table))
            raise UserError(f"missing {kind} name")
        if name not in table:
            raise UserError(f"unknown {kind} {name}")
        return name

    def lagrangian(self) -> Lagrangian:
        name = self._pick("lagrangian", self.model.lagrangians, self.lagrangian_name)
        self.lagrangian_name = name
        return Lagrangian(self.model.lagrangians[name])

    def symmetry(self):
        name = self._pick("symmetry", self.model.symmetries, self.symmetry_name)
        self.symmetry_name = name
        return self.model.symmetries[name]

    def source(self):
        name = self._pick("source", self.model.sources, self.source_name)
        self.source_name = name
        return self.model.sources[name]


def run(cmd: str, model: ModelFile, names: Optional[List[str]] = None, lagrangian: Optional[str] = None,
        symmetry: Optional[str] = None, source: Optional[str] = None,
        bounds: Optional[Bounds] = None) -> Report:
    """
    Executa um comando sobre o modelo e devolve o relatório.

    Raises:
        UserError: nomes ausentes ou desconhecidos.
        IdentityCheckError: uma identidade exata falhou (defeito interno).
    """
    if cmd not in COMMANDS:
        raise UserError(f"unknown command {cmd}")
    if bounds is None:
        bounds = Bounds(model.options.max_jet_order, model.options.max_poly_degree)
    sel = Selection(model, names or [], lagrangian, symmetry, source)
    logging.info("Executando comando %s", cmd)

    if cmd == "el":
        L = sel.lagrangian()
        E = euler_lagrange(L)
        return Report(cmd, "computed", complete=L.is_complete()).add("lagrangian", sel.lagrangian_name).add("el", E)

    if cmd == "split":
        L = sel.lagrangian()
        split = first_variational_split(L)
        return (Report(cmd, "computed", complete=L.is_complete())
                .add("lagrangian", sel.lagrangian_name).add("el", split.el)
                .add("boundary", split.boundary).add("residual_checked", split.residual_checked))

    if cmd == "lie":
        L, u = sel.lagrangian(), sel.symmetry()
        lie = lie_derivative(u, L.form())
        return (Report(cmd, "computed", complete=L.is_complete() and u.is_complete())
                .add("lagrangian", sel.lagrangian_name).add("symmetry", sel.symmetry_name).add("lie", lie))

    if cmd == "noether":
        L, u = sel.lagrangian(), sel.symmetry()
        result = noether(L, u, bounds)
        report = Report(cmd, result.kind, complete=result.complete, local=result.kind == KIND_NONE)
        report.add("lagrangian", sel.lagrangian_name).add("symmetry", sel.symmetry_name)
        report.add("kind", result.kind).add("lie", result.lie).add("sigma", result.sigma)
        report.add("current", result.current)
        report.add("residuals", {"off_shell": result.residual})
        report.add("bounds_used", result.bounds_used)
        if result.current is not None:
            report.add("note", "current is canonical modulo d_H-closed forms")
        return report

    if cmd == "trivial":
        L = sel.lagrangian()
        trivial = is_variationally_trivial(L)
        return (Report(cmd, "trivial" if trivial else "not-trivial", complete=L.is_complete(), local=True)
                .add("lagrangian", sel.lagrangian_name).add("el", euler_lagrange(L)))

    if cmd == "helmholtz":
        if sel.source_name is None and sel.lagrangian_name is not None:
            E = euler_lagrange(sel.lagrangian())
        else:
            E = sel.source()
        result = helmholtz_check(E)
        report = Report(cmd, "variational" if result.variational else "not-variational",
                        complete=result.complete, local=True)
        report.add("source", E).add("obstruction", result.obstruction)
        if result.certificate is not None:
            report.add("certificate", result.certificate.density)
        return report

    if cmd == "master-check":
        L, u = sel.lagrangian(), sel.symmetry()
        residual = master_identity_residual(L, u)
        if not residual.is_zero():
            logging.error("Identidade mestra falhou para %s, %s", sel.lagrangian_name, sel.symmetry_name)
            raise IdentityCheckError("master identity residual is not zero")
        return (Report(cmd, "PASS", complete=L.is_complete() and u.is_complete())
                .add("lagrangian", sel.lagrangian_name).add("symmetry", sel.symmetry_name)
                .add("residual", residual))

    if cmd == "decompose":
        if sel.source_name is not None:
            psi = sel.source().to_form()
        else:
            psi = project(dTotal(sel.lagrangian().form()), 1)
        result = decompose_source(psi, bounds)
        verdict = "decomposed" if result.potential is not None else "none-at-order"
        return (Report(cmd, verdict, complete=result.complete)
                .add("input", psi).add("source", result.source).add("potential", result.potential)
                .add("bounds_used", result.bounds_used))

    if cmd == "potential":
        L = sel.lagrangian()
        report = Report(cmd, "", complete=L.is_complete(), local=True).add("lagrangian", sel.lagrangian_name)
        if not is_variationally_trivial(L):
            report.verdict = "not-trivial"
            return report.add("potential", None)
        used = bounds.resolve(L.form()) if L.form().is_polynomial() else bounds
        xi = find_horizontal_potential(L.form(), used)
        report.verdict = "found" if xi is not None else "none-at-order"
        return report.add("potential", xi).add("bounds_used", used)

    if cmd == "invariance":
        L, u = sel.lagrangian(), sel.symmetry()
        result = euler_lagrange_invariance(L, u)
        return (Report(cmd, "invariant" if result.invariant else "not-invariant", complete=result.complete)
                .add("lagrangian", sel.lagrangian_name).add("symmetry", sel.symmetry_name)
                .add("lie_of_source", result.lie_of_source))

    # inverse
    E = sel.source()
    result = helmholtz_check(E)
    if not result.variational:
        return Report(cmd, "not-variational", complete=result.complete, local=True).add("obstruction", result.obstruction)
    lagrangian_density = result.certificate.density if result.certificate is not None else None
    return (Report(cmd, "variational" if lagrangian_density is not None else "no-certificate",
                   complete=result.complete, local=True)
            .add("source", E).add("lagrangian", lagrangian_density))


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(prog="jetvar", description="Cálculo variacional exato em fibrados de jatos.")
    p.add_argument("command", choices=COMMANDS, help="Comando a executar.")
    p.add_argument("names", nargs="*", help="Nomes de lagrangiana, simetria ou fonte do modelo.")
    p.add_argument("--model", required=True, help="Arquivo de modelo (.jv).")
    p.add_argument("--lagrangian", default=None, help="Nome da lagrangiana.")
    p.add_argument("--symmetry", default=None, help="Nome do campo de simetria.")
    p.add_argument("--source", default=None, help="Nome da forma-fonte.")
    p.add_argument("--max-jet-order", type=int, default=None, help="Ordem máxima de jato do ansatz.")
    p.add_argument("--max-degree", type=int, default=None, help="Grau polinomial máximo do ansatz.")
    p.add_argument("--format", choices=FORMATS, default=None, help="Formato da saída.")
    return p.parse_intermixed_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    level = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        model = load_model(args.model)
        fmt = args.format or model.options.output or os.environ.get(FORMAT_ENV) or "text"
        if fmt not in FORMATS:
            raise UserError(f"unknown output format {fmt} (from {FORMAT_ENV})")
        bounds = Bounds(
            args.max_jet_order if args.max_jet_order is not None else model.options.max_jet_order,
            args.max_degree if args.max_degree is not None else model.options.max_poly_degree,
        )
        report = run(args.command, model, args.names, args.lagrangian, args.symmetry, args.source, bounds)
    except IdentityCheckError as exc:
        print(f"INTERNAL ERROR: identity check failed: {exc}", file=sys.stderr)
        print("This is a bug in jetvar; please report it with the model file.", file=sys.stderr)
        return EXIT_IDENTITY_FAILURE
    except (ParseError, UserError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER_ERROR

    sys.stdout.write(render(report, fmt))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
