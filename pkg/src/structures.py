# src/structures.py
import heapq
import logging
from typing import Dict, List, Optional, Tuple

from .expressions import Expression
from .jets import JetVariable


class _Descending:
    """Inverte a comparação para usar heapq como heap de máximo."""

    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other: "_Descending") -> bool:
        return self.key > other.key

    def __eq__(self, other) -> bool:
        return isinstance(other, _Descending) and self.key == other.key


class DescentQueue:
    """
    Fila de prioridade (heap binário) de variáveis de jato com coeficientes.

    Usada pela descida de integração por partes: cada entrada é um termo
    f·θ^i_Λ∧ω pendente, e a extração devolve sempre a maior variável na ordem
    canônica. Inserir uma variável já pendente soma o coeficiente ao existente,
    então cada variável é extraída no máximo uma vez enquanto as inserções só
    descem de ordem.

    Características:
    - Inserção e extração em O(log n)
    - Usa tuplas (prioridade, contador, valor) no heap
    - Logging para depuração

    Exemplo de uso:
        queue = DescentQueue()
        queue.insert(sig.jet("u", "x"), f)
        queue.insert(sig.jet("u"), g)
        jv, coeff = queue.extract_max()   # u[x] primeiro
    """

    def __init__(self, debug: bool = False):
        self.heap: List[Tuple[_Descending, int, JetVariable]] = []
        self.pending: Dict[JetVariable, Expression] = {}
        self.debug = debug
        self._entry_counter = 0
        logging.debug("DescentQueue inicializada")

    def insert(self, jv: JetVariable, coeff: Expression) -> None:
        """
        Acrescenta coeff ao termo pendente de jv (cria a entrada se preciso).

        Raises:
            TypeError: se jv não for uma JetVariable.
        """
        if not isinstance(jv, JetVariable):
            logging.error("Prioridade deve ser uma JetVariable, recebido: %s", type(jv))
            raise TypeError(f"priority must be a JetVariable, got {type(jv)}")

        if jv in self.pending:
            self.pending[jv] = self.pending[jv] + coeff
            return

        self.pending[jv] = coeff
        heapq.heappush(self.heap, (_Descending(jv.sort_key()), self._entry_counter, jv))
        self._entry_counter += 1

        if self.debug:
            logging.debug("Inserido: %s (tamanho: %d)", jv, len(self.heap))
            self._verify_heap_property()

    def extract_max(self) -> Tuple[JetVariable, Expression]:
        """
        Remove e devolve (variável, coeficiente acumulado) de maior prioridade.

        Raises:
            IndexError: se a fila estiver vazia.
        """
        if not self.heap:
            logging.warning("Tentativa de extract_max em DescentQueue vazia")
            raise IndexError("extract_max from empty descent queue")

        _, _, jv = heapq.heappop(self.heap)
        coeff = self.pending.pop(jv)

        if self.debug:
            logging.debug("Extraído: %s (tamanho: %d)", jv, len(self.heap))
            self._verify_heap_property()

        return jv, coeff

    def _verify_heap_property(self) -> None:
        """Cada pai deve ter prioridade maior ou igual à dos filhos."""
        for i in range(len(self.heap)):
            for child in (2 * i + 1, 2 * i + 2):
                if child < len(self.heap) and self.heap[child][0] < self.heap[i][0]:
                    logging.error("Propriedade de heap violada: pai[%d] < filho[%d]", i, child)
                    raise ValueError("Propriedade de heap violada")

    def peek(self) -> Optional[JetVariable]:
        if self.heap:
            return self.heap[0][2]
        return None

    def is_empty(self) -> bool:
        return len(self.heap) == 0

    def size(self) -> int:
        return len(self.heap)

    def __repr__(self) -> str:
        return f"DescentQueue({len(self.heap)} elementos)"
