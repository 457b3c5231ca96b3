# src/tests/conftest.py
# ============================================================
# Fixtures reutilizáveis para os testes.
# Inclui um "PATH FIX" para garantir que 'src/' seja importável
# ao rodar pytest de qualquer diretório.
# ============================================================

# --- PATH FIX: coloca raiz do repo e 'src/' no sys.path ---
import sys, pathlib
ROOT = pathlib.Path(__file__).resolve().parents[2]
for p in (ROOT, ROOT / "src"):
    p = str(p)
    if p not in sys.path:
        sys.path.insert(0, p)
# ----------------------------------------------------------

import os
import random

import pytest

from src.expressions import Expression
from src.grammar import parse_expression
from src.jets import BundleSignature

# Tamanho dos corpora aleatórios e semente base (configuráveis por ambiente).
CORPUS_SIZE = int(os.environ.get("JETVAR_CORPUS_SIZE", "200"))
SEED = int(os.environ.get("JETVAR_SEED", "20240"))
MODELS_DIR = ROOT / "models"


def corpus(size: int = CORPUS_SIZE):
    """Sementes do corpus aleatório, para pytest.mark.parametrize."""
    return [SEED + i for i in range(size)]


@pytest.fixture
def sig_x():
    """Uma coordenada de base (x) e um campo (u)."""
    return BundleSignature(("x",), ("u",))


@pytest.fixture
def sig_y():
    """Uma coordenada de base (x) e um campo chamado y."""
    return BundleSignature(("x",), ("y",))


@pytest.fixture
def sig_wave():
    """Base (t, x) e um campo u: equação da onda."""
    return BundleSignature(("t", "x"), ("u",))


@pytest.fixture
def sig_rotation():
    """Base x e dois campos (u, v)."""
    return BundleSignature(("x",), ("u", "v"))


@pytest.fixture
def expr():
    """Atalho: expr(sig, "u[x]^2") lê uma expressão da gramática."""
    def _parse(sig: BundleSignature, text: str) -> Expression:
        return parse_expression(text, sig)
    return _parse


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def models_dir():
    return MODELS_DIR
