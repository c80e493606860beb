import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `import helpers`

from phishgame.corpus import GenerationSpec, default_brands, generate_corpus


@pytest.fixture(scope="session")
def brands():
    return default_brands()


@pytest.fixture(scope="session")
def corpus(brands):
    """One shared deterministic corpus, large enough for any session."""
    return generate_corpus(brands, GenerationSpec(seed=11, count=120))


@pytest.fixture(scope="session")
def items_by_id(corpus):
    return {it.item_id: it for it in corpus}
