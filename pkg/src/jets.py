# src/jets.py
"""
Assinaturas de fibrado, multi-índices simétricos e variáveis de jato.

Tudo aqui é imutável: a assinatura fixa a ordem das coordenadas de base e
dos campos, e essa ordem define todas as ordenações canônicas usadas pelos
outros módulos (expressões, formas, operadores).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, List, Optional, Tuple, Union

import sympy

# Nomes com significado próprio na gramática; não podem nomear coordenadas.
RESERVED_NAMES = frozenset({"sin", "cos", "exp", "d", "theta", "omega"})


@dataclass(frozen=True)
class BundleSignature:
    """
    Coordenadas (x^λ, y^i) de um fibrado Y -> X numa única carta.

    Args:
        base_names: nomes das coordenadas de base x^1..x^n (n >= 1)
        fiber_names: nomes dos campos y^1..y^m (m >= 1)
        param_names: constantes declaradas (opcional); nunca são derivadas

    Raises:
        ValueError: nomes repetidos, reservados, inválidos ou listas vazias.

    Example:
        >>> sig = BundleSignature(("t", "x"), ("u",))
        >>> sig.n, sig.m
        (2, 1)
    """

    base_names: Tuple[str, ...]
    fiber_names: Tuple[str, ...]
    param_names: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base_names", tuple(self.base_names))
        object.__setattr__(self, "fiber_names", tuple(self.fiber_names))
        object.__setattr__(self, "param_names", tuple(self.param_names))

        if len(self.base_names) < 1:
            raise ValueError("A base precisa de pelo menos uma coordenada (n >= 1)")
        if len(self.fiber_names) < 1:
            raise ValueError("O fibrado precisa de pelo menos um campo (m >= 1)")

        names = self.base_names + self.fiber_names + self.param_names
        seen = set()
        for name in names:
            if not isinstance(name, str) or not name.isidentifier():
                raise ValueError(f"Nome de coordenada inválido: {name!r}")
            if name in RESERVED_NAMES:
                raise ValueError(f"Nome reservado não pode ser coordenada: {name}")
            if name in seen:
                raise ValueError(f"duplicate name {name}")
            seen.add(name)

    @property
    def n(self) -> int:
        return len(self.base_names)

    @property
    def m(self) -> int:
        return len(self.fiber_names)

    def base_index(self, name: str) -> int:
        try:
            return self.base_names.index(name)
        except ValueError:
            raise ValueError(f"unknown coordinate {name}") from None

    def fiber_index(self, name: str) -> int:
        try:
            return self.fiber_names.index(name)
        except ValueError:
            raise ValueError(f"unknown field {name}") from None

    def base_symbol(self, lam: int) -> sympy.Symbol:
        self._check_base(lam)
        return sympy.Symbol(self.base_names[lam])

    def base_symbols(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.base_names)

    def param_symbols(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.param_names)

    def jet(self, field: Union[int, str], *bases: Union[int, str]) -> "JetVariable":
        """Atalho: sig.jet("u", "x", "x") é y^u_(xx)."""
        i = self.fiber_index(field) if isinstance(field, str) else field
        index = MultiIndex.empty(self.n)
        for b in bases:
            index = mi_add(index, self.base_index(b) if isinstance(b, str) else b)
        return JetVariable(i, index)

    def classify(self, symbol: sympy.Symbol):
        """
        Identifica um símbolo sympy desta assinatura.

        Returns:
            ("base", λ), ("jet", JetVariable), ("param", nome) ou None.
        """
        return _classify(self, symbol.name)

    def _check_base(self, lam: int) -> None:
        if not isinstance(lam, int) or not 0 <= lam < self.n:
            logging.error("Índice de base fora do intervalo: %s (n=%d)", lam, self.n)
            raise ValueError(f"base index out of range: {lam} (n={self.n})")


@dataclass(frozen=True)
class MultiIndex:
    """
    Multi-índice simétrico Λ guardado como vetor de multiplicidades.

    counts[λ] é quantas vezes a coordenada de base λ aparece em Λ; assim
    (λμ) e (μλ) são o mesmo valor por construção.
    """

    counts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(self.counts))
        if any((not isinstance(c, int)) or c < 0 for c in self.counts):
            raise ValueError(f"Multiplicidades devem ser inteiros não negativos: {self.counts}")

    @classmethod
    def empty(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "MultiIndex":
        counts = [0] * n
        for lam in indices:
            if not 0 <= lam < n:
                raise ValueError(f"base index out of range: {lam} (n={n})")
            counts[lam] += 1
        return cls(tuple(counts))

    @property
    def order(self) -> int:
        return sum(self.counts)

    def indices(self) -> Tuple[int, ...]:
        """Sequência ordenada de índices de base, com repetição."""
        out: List[int] = []
        for lam, c in enumerate(self.counts):
            out.extend([lam] * c)
        return tuple(out)

    def largest(self) -> Optional[int]:
        """Maior índice de base presente em Λ (None para Λ vazio)."""
        for lam in range(len(self.counts) - 1, -1, -1):
            if self.counts[lam]:
                return lam
        return None

    def remove(self, lam: int) -> "MultiIndex":
        if not 0 <= lam < len(self.counts) or self.counts[lam] == 0:
            raise ValueError(f"Índice {lam} não ocorre em {self.counts}")
        counts = list(self.counts)
        counts[lam] -= 1
        return MultiIndex(tuple(counts))

    def sort_key(self) -> Tuple[int, ...]:
        # contagens maiores em coordenadas anteriores vêm primeiro: y_x antes de y_t
        return tuple(-c for c in self.counts)


def mi_add(index: MultiIndex, lam: int) -> MultiIndex:
    """
    Retorna λ+Λ; a ordem aumenta exatamente em 1.

    Raises:
        ValueError: se λ estiver fora de 0..n-1.
    """
    n = len(index.counts)
    if not isinstance(lam, int) or not 0 <= lam < n:
        logging.error("mi_add com índice fora do intervalo: %s (n=%d)", lam, n)
        raise ValueError(f"base index out of range: {lam} (n={n})")
    counts = list(index.counts)
    counts[lam] += 1
    return MultiIndex(tuple(counts))


def mi_order(index: MultiIndex) -> int:
    return index.order


@total_ordering
@dataclass(frozen=True, eq=True)
class JetVariable:
    """
    Coordenada de jato y^i_Λ.

    A ordem total é (|Λ|, campo, contagens) e é a mesma em todo o pacote.
    """

    field: int
    index: MultiIndex

    @property
    def order(self) -> int:
        return self.index.order

    def sort_key(self) -> Tuple:
        return (self.index.order, self.field, self.index.sort_key())

    def __lt__(self, other: "JetVariable") -> bool:
        if not isinstance(other, JetVariable):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def shifted(self, lam: int) -> "JetVariable":
        return JetVariable(self.field, mi_add(self.index, lam))

    def name(self, sig: BundleSignature) -> str:
        """Nome textual: `u` para ordem zero, `u[x,t]` em geral."""
        field = sig.fiber_names[self.field]
        if self.index.order == 0:
            return field
        return field + "[" + ",".join(sig.base_names[lam] for lam in self.index.indices()) + "]"

    def symbol(self, sig: BundleSignature) -> sympy.Symbol:
        return sympy.Symbol(self.name(sig))


@lru_cache(maxsize=None)
def _classify(sig: BundleSignature, name: str):
    if name in sig.base_names:
        return ("base", sig.base_names.index(name))
    if name in sig.param_names:
        return ("param", name)
    if name in sig.fiber_names:
        return ("jet", JetVariable(sig.fiber_names.index(name), MultiIndex.empty(sig.n)))
    if name.endswith("]") and "[" in name:
        field, rest = name[:-1].split("[", 1)
        if field in sig.fiber_names:
            try:
                indices = [sig.base_names.index(b) for b in rest.split(",")]
            except ValueError:
                return None
            return ("jet", JetVariable(sig.fiber_names.index(field), MultiIndex.from_indices(sig.n, indices)))
    return None


def _multi_indices(n: int, order: int) -> Iterator[MultiIndex]:
    for combo in combinations_with_replacement(range(n), order):
        yield MultiIndex.from_indices(n, combo)


def enumerate_jets(sig: BundleSignature, max_order: int) -> List[JetVariable]:
    """
    Lista todas as variáveis y^i_Λ com |Λ| <= max_order, em ordem canônica.

    O comprimento é m·C(n+max_order, n).

    Raises:
        ValueError: se max_order < 0.
    """
    if not isinstance(max_order, int) or max_order < 0:
        raise ValueError(f"max_order deve ser inteiro >= 0, recebido: {max_order}")
    jets = [
        JetVariable(i, index)
        for order in range(max_order + 1)
        for i in range(sig.m)
        for index in _multi_indices(sig.n, order)
    ]
    jets.sort()
    logging.debug("enumerate_jets: %d variáveis até ordem %d", len(jets), max_order)
    return jets
