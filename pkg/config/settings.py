"""
Settings configuration for MTLC
Environment variables and run configuration defaults
"""

import os
from typing import Dict, Any
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

class Settings:
    """Application settings with environment variable support"""

    def __init__(self):
        self.output_dir: str = os.getenv("MTLC_OUTPUT_DIR", "results")
        self.max_workers: int = int(os.getenv("MTLC_MAX_WORKERS", "4"))

        # Solver Configuration
        self.solver_tol: float = float(os.getenv("MTLC_SOLVER_TOL", "1e-10"))
        self.solver_max_iter: int = int(os.getenv("MTLC_SOLVER_MAX_ITER", "100000"))
        self.pd_tol: float = float(os.getenv("MTLC_PD_TOL", "1e-10"))

        # Spectrum Configuration
        self.tail_tol: float = float(os.getenv("MTLC_TAIL_TOL", "1e-6"))
        self.min_nystrom_nodes: int = int(os.getenv("MTLC_MIN_NYSTROM_NODES", "1024"))

        # Simulation Configuration
        self.default_replicas: int = int(os.getenv("MTLC_DEFAULT_REPLICAS", "200"))
        self.default_seed: int = int(os.getenv("MTLC_DEFAULT_SEED", "20100101"))

    def validate(self) -> Dict[str, Any]:
        """Validate configuration settings"""
        issues = []

        if self.max_workers < 1:
            issues.append("MTLC_MAX_WORKERS must be at least 1")

        if not 0.0 < self.solver_tol < 1e-2:
            issues.append("MTLC_SOLVER_TOL must be in (0, 1e-2)")

        if self.solver_max_iter < 1:
            issues.append("MTLC_SOLVER_MAX_ITER must be positive")

        if not 0.0 < self.tail_tol < 1.0:
            issues.append("MTLC_TAIL_TOL must be in (0, 1)")

        if self.default_replicas < 2:
            issues.append("MTLC_DEFAULT_REPLICAS must be at least 2")

        return {
            "valid": len(issues) == 0,
            "issues": issues
        }

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary"""
        return {
            "output_dir": self.output_dir,
            "max_workers": self.max_workers,
            "solver_tol": self.solver_tol,
            "solver_max_iter": self.solver_max_iter,
            "pd_tol": self.pd_tol,
            "tail_tol": self.tail_tol,
            "min_nystrom_nodes": self.min_nystrom_nodes,
            "default_replicas": self.default_replicas,
            "default_seed": self.default_seed
        }

def get_settings() -> Settings:
    """Get application settings instance"""
    return Settings()

# Global settings instance
settings = get_settings()
