# src/model.py
"""
Arquivos de modelo: gramática orientada a linhas.

    # comentário
    base x t
    field u v
    param m
    lagrangian L = 1/2*(u[x]^2 + v[x]^2)
    symmetry X = -v * d/du + u * d/dv
    source E = u[x] * theta[u]
    set max_jet_order 4

As declarações base/field/param precedem qualquer expressão. Toda falha vira
ParseError com linha e coluna.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .calculus import VerticalField
from .expressions import Expression
from .forms import SourceForm
from .grammar import (
    THETA_GENERATORS,
    VECTOR_GENERATORS,
    ParseError,
    parse_expression,
    parse_linear_combination,
    to_text,
)
from .jets import RESERVED_NAMES, BundleSignature

OUTPUT_FORMATS = ("text", "json", "latex")
INT_OPTIONS = ("max_jet_order", "max_poly_degree")

_DEFINITION_RE = re.compile(r"^(\s*)(lagrangian|symmetry|source)(\s+)([A-Za-z_][A-Za-z_0-9]*)(\s*)=")


@dataclass(frozen=True)
class ModelOptions:
    """Opções vindas de linhas `set`; None quando a linha não aparece."""

    max_jet_order: Optional[int] = None
    max_poly_degree: Optional[int] = None
    output: Optional[str] = None


@dataclass(frozen=True)
class ModelFile:
    signature: BundleSignature
    lagrangians: Dict[str, Expression] = field(default_factory=dict)
    symmetries: Dict[str, VerticalField] = field(default_factory=dict)
    sources: Dict[str, SourceForm] = field(default_factory=dict)
    options: ModelOptions = ModelOptions()


class _ModelParser:
    def __init__(self, source: str):
        self.lines = source.splitlines()
        self.base: Optional[List[str]] = None
        self.fields: Optional[List[str]] = None
        self.params: List[str] = []
        self.sig: Optional[BundleSignature] = None
        self.lagrangians: Dict[str, Expression] = {}
        self.symmetries: Dict[str, VerticalField] = {}
        self.sources: Dict[str, SourceForm] = {}
        self.options: Dict[str, Union[int, str]] = {}
        self.names: Dict[str, int] = {}

    def parse(self) -> ModelFile:
        for number, raw in enumerate(self.lines, start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            keyword = line.split()[0]
            column = len(line) - len(line.lstrip()) + 1
            if keyword in ("base", "field", "param"):
                self._declaration(keyword, line, number)
            elif keyword == "set":
                self._option(line, number)
            elif keyword in ("lagrangian", "symmetry", "source"):
                self._definition(line, number)
            else:
                raise ParseError(f"unknown statement {keyword!r}", number, column,
                                 ("base", "field", "param", "lagrangian", "symmetry", "source", "set"))
        sig = self._signature(len(self.lines) + 1)
        options = ModelOptions(
            self.options.get("max_jet_order"),
            self.options.get("max_poly_degree"),
            self.options.get("output"),
        )
        logging.info("Modelo lido: n=%d, m=%d, %d lagrangianas, %d simetrias, %d fontes",
                     sig.n, sig.m, len(self.lagrangians), len(self.symmetries), len(self.sources))
        return ModelFile(sig, self.lagrangians, self.symmetries, self.sources, options)

    # --- declarações --------------------------------------------------

    def _words(self, line: str) -> List[Tuple[str, int]]:
        return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]

    def _declaration(self, keyword: str, line: str, number: int) -> None:
        words = self._words(line)
        if self.sig is not None:
            raise ParseError(f"{keyword} must be declared before any definition", number, words[0][1])
        if keyword in ("base", "field") and getattr(self, "base" if keyword == "base" else "fields") is not None:
            raise ParseError(f"{keyword} declared twice", number, words[0][1])
        if len(words) < 2:
            raise ParseError(f"{keyword} needs at least one name", number, len(line) + 1, ("name",))
        names = []
        for word, col in words[1:]:
            if not word.isidentifier():
                raise ParseError(f"invalid name {word!r}", number, col, ("name",))
            if word in RESERVED_NAMES:
                raise ParseError(f"reserved name {word}", number, col)
            self._claim(word, number, col)
            names.append(word)
        if keyword == "base":
            self.base = names
        elif keyword == "field":
            self.fields = names
        else:
            self.params.extend(names)

    def _claim(self, name: str, number: int, column: int) -> None:
        if name in self.names:
            raise ParseError(f"duplicate name {name}", number, column)
        self.names[name] = number

    def _signature(self, number: int) -> BundleSignature:
        if self.sig is None:
            if self.base is None:
                raise ParseError("missing base declaration", number, 1, ("base",))
            if self.fields is None:
                raise ParseError("missing field declaration", number, 1, ("field",))
            try:
                self.sig = BundleSignature(tuple(self.base), tuple(self.fields), tuple(self.params))
            except ValueError as exc:
                raise ParseError(str(exc), number, 1) from None
        return self.sig

    def _option(self, line: str, number: int) -> None:
        words = self._words(line)
        if len(words) != 3:
            raise ParseError("set takes an option name and a value", number, words[0][1], ("option", "value"))
        (key, key_col), (value, value_col) = words[1], words[2]
        if key in INT_OPTIONS:
            if not value.isdigit() or int(value) < 1:
                raise ParseError(f"{key} must be a positive integer", number, value_col, ("integer",))
            self.options[key] = int(value)
        elif key == "output":
            if value not in OUTPUT_FORMATS:
                raise ParseError(f"unknown output format {value}", number, value_col, OUTPUT_FORMATS)
            self.options[key] = value
        else:
            raise ParseError(f"unknown option {key}", number, key_col, INT_OPTIONS + ("output",))

    # --- definições ---------------------------------------------------

    def _definition(self, line: str, number: int) -> None:
        match = _DEFINITION_RE.match(line)
        if match is None:
            words = self._words(line)
            column = words[1][1] if len(words) > 1 else len(line) + 1
            raise ParseError("expected NAME = expression", number, column, ("name", "'='"))
        sig = self._signature(number)
        kind, name = match.group(2), match.group(4)
        self._claim(name, number, match.start(4) + 1)
        body = line[match.end():]
        if not body.strip():
            raise ParseError("empty expression", number, match.end() + 1, ("expression",))
        offset = match.end()
        if kind == "lagrangian":
            self.lagrangians[name] = parse_expression(body, sig, number, offset)
        elif kind == "symmetry":
            components = parse_linear_combination(body, sig, VECTOR_GENERATORS, number, offset)
            self.symmetries[name] = VerticalField(sig, components)
        else:
            components = parse_linear_combination(body, sig, THETA_GENERATORS, number, offset)
            self.sources[name] = SourceForm(sig, components)


def parse_model(source: str) -> ModelFile:
    """
    Lê o texto de um modelo.

    Raises:
        ParseError: erro de sintaxe, nome desconhecido ou repetido.
    """
    return _ModelParser(source).parse()


def load_model(path: Union[str, Path]) -> ModelFile:
    path = Path(path)
    if not path.exists():
        logging.error("Arquivo de modelo não encontrado: %s", path)
        raise FileNotFoundError(f"model file {path} not found")
    logging.info("Carregando modelo %s", path)
    return parse_model(path.read_text(encoding="utf-8"))


def _combination_text(sig: BundleSignature, components: Dict[int, Expression], generator) -> str:
    if not components:
        return "0"
    return " + ".join(f"({to_text(c)})*{generator(sig.fiber_names[i])}" for i, c in components.items())


def render_model(model: ModelFile) -> str:
    """Imprime o modelo de volta na gramática; parse_model(render_model(m)) == m."""
    sig = model.signature
    lines = [f"base {' '.join(sig.base_names)}", f"field {' '.join(sig.fiber_names)}"]
    if sig.param_names:
        lines.append(f"param {' '.join(sig.param_names)}")
    for key in INT_OPTIONS + ("output",):
        value = getattr(model.options, key)
        if value is not None:
            lines.append(f"set {key} {value}")
    for name, density in model.lagrangians.items():
        lines.append(f"lagrangian {name} = {to_text(density)}")
    for name, u in model.symmetries.items():
        lines.append(f"symmetry {name} = {_combination_text(sig, u.components, lambda f: f'd/d{f}')}")
    for name, E in model.sources.items():
        lines.append(f"source {name} = {_combination_text(sig, E.components, lambda f: f'theta[{f}]')}")
    return "\n".join(lines) + "\n"
