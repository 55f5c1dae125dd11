"""Dispatch from a model block to its sampler."""

from __future__ import annotations

from typing import Optional

from config import ModelConfig
from graphs.core import BadParameter, BoxSpec, Graph
from graphs.gff import gen_gff_excursion
from graphs.gw import GWRecord, gen_gw_tree
from graphs.interlacements import gen_interlacements
from graphs.percolation import gen_bond_percolation, gen_site_percolation
from graphs.rgg import gen_rgg


def model_box(model: ModelConfig, n: int) -> Optional[BoxSpec]:
    """The box B_n a model lives in (None for trees)."""
    if model.model == "gw":
        return None
    return BoxSpec(n, model.d, "continuum" if model.model == "rgg" else "lattice")


def generate(model: ModelConfig, n: int, seed: int) -> Graph:
    """Sample the model at scale n (generation count for gw)."""
    name = model.model
    if name == "gw":
        return generate_gw(model, n, seed).tree
    box = model_box(model, n)
    if name == "bond":
        return gen_bond_percolation(box, model.p, seed)
    if name == "site":
        return gen_site_percolation(box, model.p, seed)
    if name == "rgg":
        return gen_rgg(box, model.R, seed)
    if name == "gff":
        return gen_gff_excursion(box, model.h, model.pad_factor, seed)
    if name in ("ri-occupied", "ri-vacant"):
        return gen_interlacements(box, model.u, model.kill_radius, seed,
                                  occupied=name == "ri-occupied", walks=model.cap_walks)
    raise BadParameter(f"unknown model {name!r}")


def generate_gw(model: ModelConfig, n: int, seed: int) -> GWRecord:
    return gen_gw_tree(model.nu, n, model.conditioning, seed)
