"""Shared fixtures: small INP texts and networks used across test modules."""

import pytest

from hydrolora import build_network, tokenize_inp

TWO_NODE_INP = """\
[JUNCTIONS]
 J1  100  5
 J2  95   2
[PIPES]
 P1  J1  J2  100  0.3  130
[COORDINATES]
 J1  0  0
 J2  100  0
"""

# Reservoir feeding a two-junction chain: R - J1 - J2.
CHAIN_INP = """\
[RESERVOIRS]
 R1  150
[JUNCTIONS]
 J1  100  1
 J2  95   2
[PIPES]
 P1  R1  J1  100  0.3  130
 P2  J1  J2  100  0.3  130
[COORDINATES]
 R1  0    0
 J1  100  0
 J2  200  0
"""


@pytest.fixture
def two_node_net():
    return build_network(tokenize_inp(TWO_NODE_INP))


@pytest.fixture
def chain_net():
    return build_network(tokenize_inp(CHAIN_INP))


def make_network(n_junctions, pipes, demands=None, reservoirs=(), coords=None):
    """Assemble a small INP text and build it.

    ``pipes`` is a list of (a, b) junction indices (1-based); ``reservoirs``
    extra source ids wired to junction 1.
    """
    demands = demands or {}
    lines = ["[JUNCTIONS]"]
    for i in range(1, n_junctions + 1):
        lines.append(f" J{i} 100 {demands.get(i, 0)}")
    if reservoirs:
        lines.append("[RESERVOIRS]")
        for rid in reservoirs:
            lines.append(f" {rid} 150")
    lines.append("[PIPES]")
    for idx, (a, b) in enumerate(pipes, start=1):
        lines.append(f" P{idx} J{a} J{b} 100 0.3 130")
    if reservoirs:
        for idx, rid in enumerate(reservoirs, start=len(pipes) + 1):
            lines.append(f" P{idx} {rid} J1 100 0.3 130")
    lines.append("[COORDINATES]")
    for i in range(1, n_junctions + 1):
        xy = coords.get(i, (i * 10, 0)) if coords else (i * 10, 0)
        lines.append(f" J{i} {xy[0]} {xy[1]}")
    for idx, rid in enumerate(reservoirs):
        lines.append(f" {rid} {-10 * (idx + 1)} 0")
    return build_network(tokenize_inp("\n".join(lines)))
