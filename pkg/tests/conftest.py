import pytest
from mpmath import mp, mpf

from src.repository.moment_files import write_moment_file


@pytest.fixture()
def precision():
    with mp.workprec(256):
        yield 256


@pytest.fixture()
def chebyshev_file(tmp_path, precision):
    # moments of the semicircle law on [-1, 1]
    values = [1, 0, mpf(1) / 4, 0, mpf(1) / 8]
    return write_moment_file(values, tmp_path / "chebyshev.txt", 128)


@pytest.fixture()
def indefinite_file(tmp_path):
    path = tmp_path / "indefinite.txt"
    path.write_text("0 1\n1 2\n2 1\n", encoding="utf-8")
    return path


@pytest.fixture()
def jacobi_file(tmp_path):
    path = tmp_path / "jacobi.txt"
    path.write_text("# s0: 1\n" + "".join(f"{n} 0 0.5\n" for n in range(6)), encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def sw_options():
    return ["--family", "stieltjes-wigert", "--q", "0.5"]
