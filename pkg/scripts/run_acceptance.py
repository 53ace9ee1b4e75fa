#!/usr/bin/env python3
"""Run the acceptance gate and show one PASS/FAIL line per criterion."""

import sys

import pytest

if __name__ == "__main__":
    sys.exit(pytest.main(["tests/test_acceptance.py", "-q", "-s", *sys.argv[1:]]))
