from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRIMES = st.sampled_from([2, 3, 5, 7])


@st.composite
def rationals(draw, max_num=10**6, max_den=10**4, nonzero=False):
    num = draw(st.integers(-max_num, max_num).filter(lambda v: v or not nonzero))
    den = draw(st.integers(1, max_den))
    return Fraction(num, den)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
