import os

import pytest

from momentopt.serialize import load_json, matrix_from_dict, problem_from_dict

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURE_DIR, name + ".json")


def load_matrix(name):
    return matrix_from_dict(load_json(fixture_path(name)))


def load_problem(name):
    return problem_from_dict(load_json(fixture_path(name)))


def load_pop(name):
    return load_problem(name).to_pop()


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR
