import pytest

from src.expressions import Expression
from src.jets import BundleSignature
from src.structures import DescentQueue

"""
Olá, bem vindo ao módulo de testes da DescentQueue.
 - Extração sempre da maior variável de jato na ordem canônica.
 - Inserções repetidas da mesma variável somam os coeficientes.
 - Casos de borda (fila vazia, prioridade de tipo errado, modo debug).
"""

SIG = BundleSignature(("x", "t"), ("u", "v"))


def coeff(value):
    return Expression.constant(SIG, value)


def test_extract_max_in_canonical_order():
    q = DescentQueue()
    q.insert(SIG.jet("u"), coeff(1))
    q.insert(SIG.jet("u", "x", "x"), coeff(2))
    q.insert(SIG.jet("v", "t"), coeff(3))
    q.insert(SIG.jet("u", "t"), coeff(4))
    order = [q.extract_max()[0] for _ in range(4)]
    assert order == [SIG.jet("u", "x", "x"), SIG.jet("v", "t"), SIG.jet("u", "t"), SIG.jet("u")]


def test_insert_merges_pending_coefficient():
    q = DescentQueue()
    q.insert(SIG.jet("u", "x"), coeff(2))
    q.insert(SIG.jet("u", "x"), coeff(3))
    assert q.size() == 1, "A mesma variável não deve gerar duas entradas"
    jv, c = q.extract_max()
    assert jv == SIG.jet("u", "x")
    assert c == 5


def test_extract_max_empty_raises():
    q = DescentQueue()
    with pytest.raises(IndexError):
        q.extract_max()


def test_insert_invalid_priority_type():
    q = DescentQueue()
    with pytest.raises(TypeError):
        q.insert("u[x]", coeff(1))


def test_peek_and_size():
    q = DescentQueue()
    assert q.peek() is None
    assert q.is_empty()
    q.insert(SIG.jet("u"), coeff(1))
    q.insert(SIG.jet("u", "x"), coeff(1))
    assert q.peek() == SIG.jet("u", "x")
    assert q.size() == 2
    assert not q.is_empty()


def test_debug_mode_keeps_heap_property():
    q = DescentQueue(debug=True)
    for jv in [SIG.jet("v"), SIG.jet("u", "x", "t"), SIG.jet("u"), SIG.jet("v", "x"), SIG.jet("u", "t", "t")]:
        q.insert(jv, coeff(1))
    previous = None
    while not q.is_empty():
        jv, _ = q.extract_max()
        if previous is not None:
            assert jv < previous, f"{jv} extraído depois de {previous}"
        previous = jv


def test_reinsert_after_extraction():
    q = DescentQueue()
    q.insert(SIG.jet("u", "x"), coeff(1))
    q.extract_max()
    q.insert(SIG.jet("u", "x"), coeff(7))
    assert q.extract_max() == (SIG.jet("u", "x"), coeff(7))
