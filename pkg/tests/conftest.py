import pytest

from vdconf.encode import compile_model
from vdconf.model import parse_model

TSHIRT_JSON = """{
  "variables": [
    {"name": "color", "values": ["black", "white", "red", "blue"]},
    {"name": "size", "values": ["small", "medium", "large"]},
    {"name": "print", "values": ["MIB", "STW"]}
  ],
  "rules": ["print=MIB => color=black", "print=STW => size!=small"]
}"""

# color: black=0 white=1 red=2 blue=3; size: small=0 medium=1 large=2;
# print: MIB=0 STW=1
TSHIRT_SOLUTIONS = {
    (0, 0, 0),
    (0, 1, 0),
    (0, 1, 1),
    (0, 2, 0),
    (0, 2, 1),
    (1, 1, 1),
    (1, 2, 1),
    (2, 1, 1),
    (2, 2, 1),
    (3, 1, 1),
    (3, 2, 1),
}


@pytest.fixture(scope="session")
def tshirt_model():
    return parse_model(TSHIRT_JSON)


@pytest.fixture(scope="session")
def tshirt_space(tshirt_model):
    return compile_model(tshirt_model)
