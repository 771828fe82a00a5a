import numpy as np
import pytest
from hypothesis import strategies as st

from alphaprod.perm import Permutation, is_even
from alphaprod.vectors import ProductVector


def perms(t):
    return st.permutations(range(t)).map(lambda img: Permutation(img))


def even_perms(t):
    return perms(t).filter(is_even)


def nonid_even_perms(t):
    return even_perms(t).filter(lambda p: not p.is_identity())


def vectors(t, length):
    return st.lists(even_perms(t), min_size=length, max_size=length).map(ProductVector.of)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
