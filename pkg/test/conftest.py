import pytest
from .support import example_game, make_rng, random_game


def pytest_addoption(parser):
    parser.addoption(
        "--slow", action="store_true",
        help="Run the statistical checks at full scale (many seeds, long "
             "horizons) instead of the reduced default")
    parser.addoption(
        "--fast", action="store_true",
        help="Skip every test marked as slow")


@pytest.hookimpl(trylast=True)
def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: statistical checks over many seeds and long horizons"
    )


def pytest_collection_modifyitems(config, items):
    if not config.getoption('--fast'):
        return
    skip = pytest.mark.skip(reason='--fast given')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope='session')
def full_scale(request):
    return request.config.getoption('--slow')


@pytest.fixture
def game():
    return example_game()


@pytest.fixture
def rng(request):
    # one stream per test, independent of test order and of xdist workers
    return make_rng(request.node.nodeid)


@pytest.fixture
def rand_game(rng):
    return random_game(rng, 2, 3)
