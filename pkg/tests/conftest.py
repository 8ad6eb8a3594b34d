import pytest

from src.fum_core import Coloring
from src.generators import GadgetHandle, gen_cycle, gen_fig1, gen_gadget, gen_k4
from src.plane_graph import PlaneGraph


@pytest.fixture(scope="session")
def triangle() -> PlaneGraph:
    return gen_cycle(3)


@pytest.fixture(scope="session")
def square() -> PlaneGraph:
    return gen_cycle(4)


@pytest.fixture(scope="session")
def k4() -> PlaneGraph:
    return gen_k4()


@pytest.fixture(scope="session")
def gadget1() -> GadgetHandle:
    return gen_gadget(1)


@pytest.fixture(scope="session")
def fig1() -> PlaneGraph:
    return gen_fig1()


@pytest.fixture
def h1_fum_coloring() -> Coloring:
    # a1..a4 then b1..b4; color 4 once on the outer cycle and once on the inner one.
    return Coloring((4, 2, 1, 3, 3, 4, 2, 1), 4)


@pytest.fixture
def write_file(tmp_path):
    def write(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return write
