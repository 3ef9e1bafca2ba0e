# configs/environment.py

import os
from dotenv import load_dotenv
from src.utils.logger import WorkbenchLogger

load_dotenv()


class EnvironmentConfig:
    """Runtime defaults for experiments, numerics and reporting"""

    # Per-experiment default parameters, merged under user configs
    EXPERIMENT_DEFAULTS = {
        "spectrum": {
            "n": 8,
            "amplitude": 1e-3,
            "seed": None,
        },
        "gaps": {
            "n": 8,
            "model": "toda",
            "beta": 1.0,
            "amplitude": 1e-2,
            "steps": 2000,
            "dt": None,
            "integrator": "yoshida4",
            "gap_every": 10,
            "seed": None,
        },
        "simulate": {
            "n": 16,
            "model": "toda",
            "beta": 1.0,
            "amplitude": 1e-2,
            "steps": 2000,
            "dt": None,
            "integrator": "yoshida4",
            "sample_every": 10,
            "gap_every": 0,
            "seed": None,
        },
        "packet": {
            "n_values": [32],
            "models": ["toda", "fpu"],
            "beta": 1.0,
            "R": 0.5,
            "sigma": 0.5,
            "s": 1.0,
            "phase": 0.0,
            "t_max": 25000.0,
            "dt": None,
            "max_steps": 1_000_000,
            "integrator": "yoshida4",
            "sample_every": 1000,
            "fit_k_max": 8,
            "fit_t_start": 0.0,
            "workers": None,
            "seed": None,
        },
        "scaling": {
            "n_values": [8, 16, 32, 64, 128, 256],
            "s": 1.0,
            "sigma": 0.0,
            "crosscheck_max_n": 16,
        },
        "kp-check": {
            "n_max": 30,
            "r_max": 5,
            "max_degree": 8,
            "n_vars": 2,
            "rho": 1.0,
            "trials": 100,
            "seed": None,
        },
    }

    # Environment variables
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", "reports/experiments")
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "1234"))

    # Numerics
    DT_SAFETY_FACTOR = float(os.getenv("DT_SAFETY_FACTOR", "0.01"))
    QUAD_POINTS = int(os.getenv("QUAD_POINTS", "64"))
    MAX_DEGREE = int(os.getenv("MAX_DEGREE", "8"))
    SEPARATION_FACTOR = float(os.getenv("SEPARATION_FACTOR", "10"))
    EIGEN_RESIDUAL_TOL = float(os.getenv("EIGEN_RESIDUAL_TOL", "1e-10"))
    MAX_WORKERS = int(os.getenv("MAX_WORKERS", "1"))

    @classmethod
    def get_output_dir(cls, override=None):
        """
        Resolve the output directory for experiment artifacts.

        Args:
            override: directory passed on the command line, wins over OUTPUT_DIR

        Returns:
            Directory path as a string
        """
        return str(override or cls.OUTPUT_DIR)

    @classmethod
    def get_experiment_defaults(cls, experiment):
        """
        Default parameters for one experiment.

        Args:
            experiment: experiment name (spectrum, gaps, simulate, packet, scaling, kp-check)

        Returns:
            A fresh dict of defaults with the seed filled in
        """
        defaults = cls.EXPERIMENT_DEFAULTS.get(experiment)
        if defaults is None:
            logger = WorkbenchLogger("EnvironmentConfig")
            logger.warning(f"⚠️ No defaults registered for experiment '{experiment}'")
            return {}

        merged = {key: (list(value) if isinstance(value, list) else value) for key, value in defaults.items()}
        if "seed" in merged and merged["seed"] is None:
            merged["seed"] = cls.DEFAULT_SEED
        return merged

    @classmethod
    def get_default_dt(cls, max_omega):
        """
        Default step dt = DT_SAFETY_FACTOR / max omega_k.

        With the default factor 0.01, Yoshida4 keeps the relative energy drift of
        Toda runs at specific energy 1e-4 below 1e-8 over T = 100.
        """
        return cls.DT_SAFETY_FACTOR / max_omega

    @classmethod
    def get_environment_metadata(cls):
        """Environment metadata recorded next to experiment results"""
        return {
            "output_dir": cls.OUTPUT_DIR,
            "log_level": cls.LOG_LEVEL,
            "default_seed": cls.DEFAULT_SEED,
            "dt_safety_factor": cls.DT_SAFETY_FACTOR,
            "quad_points": cls.QUAD_POINTS,
            "max_degree": cls.MAX_DEGREE,
            "separation_factor": cls.SEPARATION_FACTOR,
            "eigen_residual_tol": cls.EIGEN_RESIDUAL_TOL,
            "max_workers": cls.MAX_WORKERS,
        }
