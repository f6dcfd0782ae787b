from .simulate import command as simulate_command
from .pool import command as pool_command
from .optimality import command as optimality_command
from .sweep import command as sweep_command
from .convergence import command as convergence_command
from .replicate import command as replicate_command

__all__ = [
    "simulate_command", "pool_command", "optimality_command",
    "sweep_command", "convergence_command", "replicate_command",
]
