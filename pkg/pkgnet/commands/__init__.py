"""CLI subcommands, one module each"""
from pkgnet.commands import ablate, evaluate, history, manipulate, plot, reproduce, train

SUBCOMMANDS = (train, evaluate, manipulate, ablate, plot, reproduce, history)

__all__ = ["SUBCOMMANDS"]
