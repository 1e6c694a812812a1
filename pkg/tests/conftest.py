from __future__ import annotations

import pytest

from tapestry import crypto
from tapestry.analysis.embedding import HashEmbedder
from tapestry.datalake import DataLake, LakeConfig
from tapestry.ledger import Chain, ChainConfig
from tapestry.services.clients import LocalLakeClient, LocalLedgerClient


@pytest.fixture(scope="session")
def identity():
    return crypto.generate_identity(bytes(32))


@pytest.fixture(scope="session")
def embedder():
    return HashEmbedder()


@pytest.fixture
def stack():
    """(chain, lake, lake_client, ledger_client) with a fast ledger."""
    chain = Chain(ChainConfig(difficulty=8))
    lake = DataLake(chain, LakeConfig())
    return chain, lake, LocalLakeClient(lake), LocalLedgerClient(chain)
