import doctest

from _pytest.doctest import DoctestItem


def pytest_collection_modifyitems(items):
    # Under zope-testrunner, test_suite() passes a test module's ``checker``
    # to DocTestSuite; give pytest's doctest collection the same wiring.
    for item in items:
        if not isinstance(item, DoctestItem) or item.dtest is None:
            continue
        checker = item.dtest.globs.get('checker')
        if (item.dtest.name.startswith('radarpnp.tests.')
                and isinstance(checker, doctest.OutputChecker)):
            item.runner._checker = checker
