# src/render.py
"""
Relatórios e sua renderização em texto ASCII, JSON (schema 1) e LaTeX.

O texto de expressões usa a gramática de entrada, então qualquer coeficiente
impresso pode ser relido por parse_expression.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .calculus import VerticalField
from .expressions import Expression
from .forms import Form, SourceForm
from .grammar import to_latex, to_text
from .jets import BundleSignature, JetVariable, MultiIndex
from .potential import Bounds

JSON_SCHEMA = 1
INCOMPLETE_WARNING = "WARNING: zero-test incomplete"
LOCAL_NOTE = "local verdict: closed forms on the total space are not detected"
FORMATS = ("text", "json", "latex")


@dataclass
class Report:
    """
    Resultado de um comando: veredito e itens nomeados, em ordem fixa.

    Os valores podem ser str, bool, int, None, Expression, Form, SourceForm,
    VerticalField, Bounds ou dicionários desses.
    """

    command: str
    verdict: str
    items: List[Tuple[str, Any]] = field(default_factory=list)
    complete: bool = True
    local: bool = False

    def add(self, key: str, value: Any) -> "Report":
        self.items.append((key, value))
        return self


# --- texto ------------------------------------------------------------------

def _factor_text(sig: BundleSignature, kind: str, value) -> str:
    if kind == "dx":
        return "d" + sig.base_names[value]
    jv: JetVariable = value
    field_name = sig.fiber_names[jv.field]
    if jv.order == 0:
        return f"theta[{field_name}]"
    return f"theta[{field_name}; {','.join(sig.base_names[lam] for lam in jv.index.indices())}]"


def _coefficient_text(coeff: Expression, bare: bool) -> str:
    text = to_text(coeff)
    if bare:
        return text
    if text == "1":
        return ""
    if text == "-1":
        return "-"
    if coeff.expr.is_Add:
        return f"({text}) "
    return text + " "


def _monomial_text(sig: BundleSignature, factors) -> str:
    return " ^ ".join(_factor_text(sig, kind, value) for kind, value in factors)


def form_to_text(phi: Form) -> str:
    """`c dx ^ theta[u; x]` por termo, termos unidos por ` + `."""
    if phi.is_zero():
        return "0"
    parts = []
    for mono, coeff in phi.items():
        if mono.degree == 0:
            parts.append(_coefficient_text(coeff, bare=True))
        else:
            parts.append(_coefficient_text(coeff, bare=False) + _monomial_text(phi.sig, mono.factors()))
    return " + ".join(parts)


def source_to_text(E: SourceForm) -> str:
    """Σ E_i θ^i∧ω com θ à frente: `(-u[t,t] + u[x,x]) theta[u] ^ dt ^ dx`."""
    if E.is_zero():
        return "0"
    sig = E.sig
    omega = [("dx", lam) for lam in range(sig.n)]
    parts = []
    for i, coeff in E.components.items():
        factors = [("jet", JetVariable(i, MultiIndex.empty(sig.n)))] + omega
        parts.append(_coefficient_text(coeff, bare=False) + _monomial_text(sig, factors))
    return " + ".join(parts)


def field_to_text(u: VerticalField) -> str:
    if u.is_zero():
        return "0"
    return " + ".join(f"({to_text(c)})*d/d{u.sig.fiber_names[i]}" for i, c in u.components.items())


# --- LaTeX ------------------------------------------------------------------

def _factor_latex(sig: BundleSignature, kind: str, value) -> str:
    if kind == "dx":
        return "d" + sig.base_names[value]
    jv: JetVariable = value
    head = f"\\theta^{{{sig.fiber_names[jv.field]}}}"
    if jv.order == 0:
        return head
    return head + "_{" + "".join(sig.base_names[lam] for lam in jv.index.indices()) + "}"


def _coefficient_latex(coeff: Expression) -> str:
    text = to_latex(coeff)
    if text.startswith("- "):
        text = "-" + text[2:]
    if text == "1":
        return ""
    if text == "-1":
        return "-"
    if coeff.expr.is_Add:
        text = f"\\left({text}\\right)"
    return text + "\\,"


def _monomial_latex(sig: BundleSignature, factors) -> str:
    return "\\wedge ".join(_factor_latex(sig, kind, value) for kind, value in factors)


def form_to_latex(phi: Form) -> str:
    if phi.is_zero():
        return "0"
    parts = []
    for mono, coeff in phi.items():
        if mono.degree == 0:
            parts.append(to_latex(coeff))
        else:
            parts.append(_coefficient_latex(coeff) + _monomial_latex(phi.sig, mono.factors()))
    return " + ".join(parts)


def source_to_latex(E: SourceForm) -> str:
    """SourceForm {u: -u_xx} vira `-u_{xx}\\,\\theta^{u}\\wedge dx`."""
    if E.is_zero():
        return "0"
    sig = E.sig
    omega = [("dx", lam) for lam in range(sig.n)]
    parts = []
    for i, coeff in E.components.items():
        factors = [("jet", JetVariable(i, MultiIndex.empty(sig.n)))] + omega
        parts.append(_coefficient_latex(coeff) + _monomial_latex(sig, factors))
    return " + ".join(parts)


def field_to_latex(u: VerticalField) -> str:
    if u.is_zero():
        return "0"
    parts = []
    for i, c in u.components.items():
        parts.append(f"\\left({to_latex(c)}\\right)\\partial_{{{u.sig.fiber_names[i]}}}")
    return " + ".join(parts)


# --- valores ------------------------------------------------------------------

def _bounds_value(bounds: Bounds) -> Dict[str, Optional[int]]:
    return {"max_jet_order": bounds.max_jet_order, "max_poly_degree": bounds.max_poly_degree}


def _value_text(value: Any, fmt: str) -> Any:
    """Converte um valor do relatório; em JSON devolve tipos serializáveis."""
    latex = fmt == "latex"
    if isinstance(value, Form):
        return form_to_latex(value) if latex else form_to_text(value)
    if isinstance(value, SourceForm):
        return source_to_latex(value) if latex else source_to_text(value)
    if isinstance(value, Expression):
        return to_latex(value) if latex else to_text(value)
    if isinstance(value, VerticalField):
        return field_to_latex(value) if latex else field_to_text(value)
    if isinstance(value, Bounds):
        value = _bounds_value(value)
    if isinstance(value, dict):
        converted = {k: _value_text(v, fmt) for k, v in value.items()}
        if fmt == "json":
            return converted
        return ", ".join(f"{k}={'null' if v is None else v}" for k, v in converted.items())
    if fmt != "json":
        if value is None:
            return "null"
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)
    return value


def render(report: Report, fmt: str = "text") -> str:
    """
    Renderiza um relatório.

    Raises:
        ValueError: formato desconhecido.
    """
    if fmt not in FORMATS:
        logging.error("Formato de saída desconhecido: %s", fmt)
        raise ValueError(f"unknown output format {fmt}")

    if fmt == "json":
        payload: Dict[str, Any] = {"schema": JSON_SCHEMA, "command": report.command, "verdict": report.verdict}
        for key, value in report.items:
            payload[key] = _value_text(value, fmt)
        payload["completeness_flags"] = {"zero_test_complete": report.complete, "local": report.local}
        return json.dumps(payload, separators=(",", ":"), ensure_ascii=True) + "\n"

    lines = []
    if fmt == "latex":
        lines.append(f"% jetvar {report.command}: {report.verdict}")
        for key, value in report.items:
            lines.append(f"\\text{{{key}}}: {_value_text(value, fmt)} \\\\")
        if report.local:
            lines.append(f"% {LOCAL_NOTE}")
        if not report.complete:
            lines.append(f"% {INCOMPLETE_WARNING}")
        return "\n".join(lines) + "\n"

    lines.append(f"command: {report.command}")
    lines.append(f"verdict: {report.verdict}")
    for key, value in report.items:
        lines.append(f"{key}: {_value_text(value, fmt)}")
    if report.local:
        lines.append(f"note: {LOCAL_NOTE}")
    if not report.complete:
        lines.append(INCOMPLETE_WARNING)
    text = "\n".join(lines) + "\n"
    return text.encode("ascii", "replace").decode("ascii")
