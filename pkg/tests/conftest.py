import os

import pytest

from native_parser import parse_native
from random_instances import compile_instance

SAMPLES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "samples")


@pytest.fixture
def example1_path():
    return os.path.join(SAMPLES, "example1.csp")


@pytest.fixture
def example1_text(example1_path):
    with open(example1_path, encoding="utf-8") as f:
        return f.read()


@pytest.fixture
def example1(example1_text):
    return parse_native(example1_text)


@pytest.fixture
def inequality_instance():
    return parse_native("int x 1 3\nint y 1 3\nint z 1 3\nclause sum(4*x - 3*y + z) <= 0\n")


@pytest.fixture
def example1_compiled(example1):
    return compile_instance(example1)
