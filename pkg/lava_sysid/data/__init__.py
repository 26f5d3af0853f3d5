"""
Data records and excitation signals for lava-sysid
"""

from .dataset import Dataset, load_csv, save_csv, split
from .signals import RsSignalSpec, generate_rs, generate_rs_inputs, make_rng

__all__ = [
    "Dataset",
    "load_csv",
    "save_csv",
    "split",
    "RsSignalSpec",
    "generate_rs",
    "generate_rs_inputs",
    "make_rng",
]
