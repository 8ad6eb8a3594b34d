from typing import Callable, Dict, Tuple

from hypothesis import strategies as st
from hypothesis.strategies import DrawFn, composite

from src.fum_core import Coloring
from src.generators import gen_cycle, gen_fig1, gen_gadget, gen_k4, gen_k4_composite, gen_path, gen_wheel
from src.plane_graph import PlaneGraph

SMALL_SUITE: Dict[str, Callable[[], PlaneGraph]] = {
    **{f"C{n}": (lambda n=n: gen_cycle(n)) for n in range(3, 8)},
    **{f"P{n}": (lambda n=n: gen_path(n)) for n in range(2, 6)},
    "K4": gen_k4,
    "W4": lambda: gen_wheel(4),
    "W5": lambda: gen_wheel(5),
    "H1": lambda: gen_gadget(1).graph,
}


def small_graphs() -> st.SearchStrategy[PlaneGraph]:
    return st.sampled_from(sorted(SMALL_SUITE)).map(lambda name: SMALL_SUITE[name]())


def generated_graphs() -> st.SearchStrategy[PlaneGraph]:
    """Everything the generators can produce, at sizes that keep face tracing cheap."""
    return st.one_of(
        st.integers(3, 9).map(gen_cycle),
        st.integers(1, 6).map(gen_path),
        st.integers(3, 7).map(gen_wheel),
        st.integers(1, 3).map(lambda k: gen_gadget(k).graph),
        st.just(gen_k4()),
        st.just(gen_fig1()),
        st.sets(st.integers(0, 3), min_size=1).map(gen_k4_composite),
    )


@composite
def colorings(draw: DrawFn, g: PlaneGraph, max_palette: int = 5) -> Coloring:
    k = draw(st.integers(1, max_palette))
    colors = draw(st.lists(st.integers(1, k), min_size=g.n, max_size=g.n))
    return Coloring(tuple(colors), k)


@composite
def graphs_with_colorings(draw: DrawFn, max_palette: int = 5) -> Tuple[PlaneGraph, Coloring]:
    g = draw(small_graphs())
    return g, draw(colorings(g, max_palette))
