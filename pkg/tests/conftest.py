import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.append(str(Path(__file__).parents[1]))

from ukge.core.schema import Variant, WeightedTriple
from ukge.ingestion.parser import Vocabulary, read_triples
from ukge.models.embedding_model import ModelParams, init_params

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def synonym_kg():
    """(vocab, triples) for the college/university/institute synonym graph."""
    vocab = Vocabulary()
    triples = read_triples(FIXTURES / "synonym_kg.tsv", vocab)
    return vocab, triples


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def make_params(num_entities: int = 6, num_relations: int = 3, dim: int = 4,
                variant: Variant = Variant.LOGISTIC, seed: int = 0) -> ModelParams:
    return init_params(num_entities, num_relations, dim, variant, np.random.default_rng(seed))


def triple(h: int, r: int, t: int, s: float) -> WeightedTriple:
    return WeightedTriple(head=h, relation=r, tail=t, score=s)
