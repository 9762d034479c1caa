"""Shared fixtures: the 100-instance small corpus and cached solver runs.

The corpus holds 95 synthetic instances cycling through all six constraint
classes (n between 8 and 30, m between 2 and 5) plus 5 portfolio
micro-instances built from seeded return panels.  Session-scoped fixtures
cache the oracle solution per instance and the full 2-masters x 8-pricing-set
run matrix so the acceptance tests can share them.
"""

import time

import numpy as np
import pytest

from sdqp import (CLASSES, MU_GRID, PRICING_SETS, SdConfig, SyntheticConfig,
                  build_portfolio, generate_synthetic, make_random_panel,
                  oracle_solve_qp, sd_solve)

N_CYCLE = (8, 10, 12, 14, 16, 18, 20, 22, 25, 30)
M_CYCLE = (2, 3, 4, 5)
N_SYNTHETIC = 95
PORTFOLIO_ASSETS = 10
PORTFOLIO_PERIODS = 40

ALL_LABELS = tuple(f"{master}/{pricing}"
                   for master in ("acdm", "fgpm")
                   for pricing in PRICING_SETS)


def corpus_instances():
    """Deterministic list of (name, instance) for the small corpus."""
    out = []
    for i in range(N_SYNTHETIC):
        cfg = SyntheticConfig(n=N_CYCLE[i % len(N_CYCLE)],
                              m=M_CYCLE[i % len(M_CYCLE)],
                              klass=CLASSES[i % len(CLASSES)], seed=i)
        inst, _ = generate_synthetic(cfg)
        out.append((inst.name, inst))
    for j in range(5):
        panel = make_random_panel(PORTFOLIO_ASSETS, PORTFOLIO_PERIODS, seed=j)
        inst = build_portfolio(panel, MU_GRID[j], name=f"pf-{j}")
        out.append((inst.name, inst))
    return out


@pytest.fixture(scope="session")
def small_corpus():
    return corpus_instances()


@pytest.fixture(scope="session")
def corpus_oracle(small_corpus):
    """Independently certified optimum per corpus instance."""
    return {name: oracle_solve_qp(inst) for name, inst in small_corpus}


@pytest.fixture(scope="session")
def corpus_runs(small_corpus):
    """All 16 solver configurations on every corpus instance.

    Returns (runs, elapsed_seconds) where runs maps (name, label) to the
    SdResult.  Traces keep vertex identities, so descent/recurrence/cut
    checks can reuse these runs instead of re-solving.
    """
    t0 = time.perf_counter()
    runs = {}
    for name, inst in small_corpus:
        for label in ALL_LABELS:
            cfg = SdConfig.from_label(label)
            runs[(name, label)] = sd_solve(inst, cfg)
    return runs, time.perf_counter() - t0


def rel_err(value, reference):
    return abs(value - reference) / (1.0 + abs(reference))


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
