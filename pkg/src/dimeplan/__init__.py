"""Sequential influence maximization on uncertain social networks.

Subpackages:

- ``netcore``: the uncertain-network data model, generators, partitioning, IO
- ``diffusion``: repeated-activation cascade simulation and spread estimation
- ``pomdp``: states, actions, observations, beliefs and the generative model
- ``psinet``: ensemble-of-instances voting planner
- ``heal``: partition + TASP hierarchical planner (K- and T-variants)
- ``harness``: episode loop, baselines, experiments, diagnostics
- ``service``: HTTP session facade for human-in-the-loop deployments
"""

from . import diffusion, harness, heal, netcore, pomdp, psinet
from .netcore import (
    Edge,
    InstantiatedNetwork,
    Partitioning,
    UncertainNetwork,
    generate_community,
    generate_er,
    generate_ws,
    load_network,
    save_network,
)
from .pomdp import Action, Belief, Observation, PomdpState, initial_belief

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Belief",
    "Edge",
    "InstantiatedNetwork",
    "Observation",
    "Partitioning",
    "PomdpState",
    "UncertainNetwork",
    "diffusion",
    "generate_community",
    "generate_er",
    "generate_ws",
    "harness",
    "heal",
    "initial_belief",
    "load_network",
    "netcore",
    "pomdp",
    "psinet",
    "save_network",
]
