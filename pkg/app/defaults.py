import numpy as np

from . import DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_THREADS


class AppDefaults:
    """
    The AppDefaults class holds the run configuration shared by every
    subcommand. All randomness of a run derives from the root seed through
    one numpy SeedSequence.

    Attributes:
        _seed (int): root seed of the run.
        _threads (int): worker threads for optimizer restarts.
        _restarts (int): optimizer restarts per search.
        _verbose (bool): debug logging.
    """

    def __init__(
        self,
        seed: int = DEFAULT_SEED,
        threads: int = DEFAULT_THREADS,
        restarts: int = DEFAULT_RESTARTS,
        verbose: bool = False,
    ):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        if threads < 1:
            raise ValueError(f"threads must be at least 1, got {threads}")
        if restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {restarts}")
        self._seed = seed
        self._threads = threads
        self._restarts = restarts
        self._verbose = verbose
        self._seeds = np.random.SeedSequence(seed)

    @property
    def seed(self) -> int:
        """
        Returns the root seed.

        Returns:
            int: The seed given on the command line.
        """
        return self._seed

    @property
    def threads(self) -> int:
        return self._threads

    @property
    def restarts(self) -> int:
        return self._restarts

    @property
    def verbose(self) -> bool:
        return self._verbose

    def child_seed(self) -> int:
        """
        Returns the next integer seed spawned from the root seed.

        Successive calls return independent seeds in a fixed order, so a
        run that asks for the same seeds in the same order is reproducible.

        Returns:
            int: A 32-bit seed.
        """
        (child,) = self._seeds.spawn(1)
        return int(child.generate_state(1)[0])

    def rng(self) -> np.random.Generator:
        """
        Returns a generator on the next spawned seed.

        Returns:
            np.random.Generator: A fresh generator.
        """
        return np.random.default_rng(self.child_seed())

    def as_dict(self) -> dict:
        return {
            "seed": self._seed,
            "threads": self._threads,
            "restarts": self._restarts,
        }
