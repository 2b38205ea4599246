import pytest

from sigmil.cli_harness import synth_sequence, write_sequence

BENCH_FRAMES = 200
BENCH_SEED = 42


@pytest.fixture(scope="session")
def benchmark_sequence_dir(tmp_path_factory):
    """The seeded 200-frame synthetic benchmark, written to disk once."""
    out = tmp_path_factory.mktemp("benchmark") / "synth"
    frames, boxes = synth_sequence(BENCH_FRAMES, seed=BENCH_SEED)
    write_sequence(out, frames, boxes)
    return out


@pytest.fixture(scope="session")
def short_sequence_dir(tmp_path_factory):
    """A 60-frame synthetic sequence for CLI-level determinism checks."""
    out = tmp_path_factory.mktemp("short") / "synth"
    frames, boxes = synth_sequence(60, seed=7)
    write_sequence(out, frames, boxes)
    return out
