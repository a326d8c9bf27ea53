from hypothesis import strategies as st

from wbench.terms import BINARY_OPS, INF, ONE, UNARY_OPS, ZERO, Term, atom

leaves = st.sampled_from([atom("f"), atom("g"), atom("h"), ZERO, ONE, INF])


def _extend(children):
    unary = st.builds(lambda op, a: Term(op, (a,)), st.sampled_from(UNARY_OPS), children)
    binary = st.builds(lambda op, a, b: Term(op, (a, b)), st.sampled_from(BINARY_OPS),
                       children, children)
    return unary | binary


terms = st.recursive(leaves, _extend, max_leaves=8)
