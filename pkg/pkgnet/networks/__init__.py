"""Knowledge-graph network, its layers, and the convolutional baselines"""
from pkgnet.networks.layers import Conv2d, Dense, ECCLayer, KGConv, Pooling, broadcast, occupancy
from pkgnet.networks.pkgnet import ModelOutput, PKGNetModel
from pkgnet.networks.baseline import BaselineModel
from pkgnet.networks.factory import build_model, load_model, model_config, save_model

__all__ = [
    "Conv2d",
    "Dense",
    "ECCLayer",
    "KGConv",
    "Pooling",
    "broadcast",
    "occupancy",
    "ModelOutput",
    "PKGNetModel",
    "BaselineModel",
    "build_model",
    "load_model",
    "model_config",
    "save_model"
]
