from fractions import Fraction

from hypothesis import settings, strategies as st

from kdirac.scalars import FieldScalar

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def scalars(m: int = 6):
    return st.builds(lambda a, b: FieldScalar(a, b, m), small_rationals, small_rationals)


def nonzero_scalars(m: int = 6):
    return scalars(m).filter(lambda x: not x.is_zero())


__all__ = ["Fraction", "scalars", "nonzero_scalars", "small_rationals"]
