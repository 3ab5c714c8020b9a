from typing import Iterable, Iterator, NamedTuple
from math import prod

from .errors import LayoutError


class Register(NamedTuple):
    """A named block of qubits.

    `dim` equals 2**qubits for an ordinary register. A smaller `dim` marks a
    compressed register: it stands for a `dim`-dimensional subspace of its
    qubits (the legal clock states are the only such subspace in use).
    """

    name: str
    qubits: int
    dim: int


class RegisterLayout:
    """
    An ordered list of named registers.

    Register 0 is the leftmost tensor factor, and qubit 0 is the most
    significant bit of the basis-state index.
    """

    def __init__(self, registers: Iterable[tuple]):
        """
        Parameters:
        - registers: (name, qubits) or (name, qubits, dim) tuples, or Register objects.
        """
        parsed = []
        for entry in registers:
            name, qubits, *rest = entry
            qubits = int(qubits)
            dim = int(rest[0]) if rest else 2**qubits
            if qubits < 0 or (qubits == 0 and dim != 1):
                raise LayoutError(f"Register {name!r} needs a positive qubit count")
            if dim < 1 or dim > 2**qubits:
                raise LayoutError(f"Register {name!r} has dimension {dim} for {qubits} qubits")
            parsed.append(Register(str(name), qubits, dim))

        names = [r.name for r in parsed]
        if len(set(names)) != len(names):
            raise LayoutError(f"Register names must be unique, got {names}")
        if not parsed:
            raise LayoutError("A layout needs at least one register")

        self._registers = tuple(parsed)
        self._index = {r.name: i for i, r in enumerate(parsed)}

    @property
    def registers(self) -> tuple[Register, ...]:
        return self._registers

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self._registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self._registers)

    @property
    def total_qubits(self) -> int:
        return sum(r.qubits for r in self._registers)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def is_qubit_layout(self) -> bool:
        """True when no register is compressed."""
        return all(r.dim == 2**r.qubits for r in self._registers)

    @property
    def site_dims(self) -> tuple[int, ...]:
        """Tensor factors at qubit resolution; a compressed register is a single site."""
        sites = []
        for r in self._registers:
            if r.dim == 2**r.qubits:
                sites.extend([2] * r.qubits)
            else:
                sites.append(r.dim)
        return tuple(sites)

    def register(self, name: str) -> Register:
        return self._registers[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LayoutError(f"Unknown register {name!r}; layout has {self.names}") from None

    def qubit_offset(self, name: str) -> int:
        """Index of the first qubit of a register."""
        return sum(r.qubits for r in self._registers[: self.index(name)])

    def qubit_indices(self, name: str) -> list[int]:
        start = self.qubit_offset(name)
        return list(range(start, start + self.register(name).qubits))

    def register_sites(self, name: str) -> list[int]:
        """Site indices (see `site_dims`) covered by a register."""
        start = 0
        for r in self._registers:
            width = r.qubits if r.dim == 2**r.qubits else 1
            if r.name == name:
                return list(range(start, start + width))
            start += width
        raise LayoutError(f"Unknown register {name!r}; layout has {self.names}")

    def qubit_site(self, qubit: int) -> int:
        """Site index of a physical qubit living in an uncompressed register."""
        if not 0 <= qubit < self.total_qubits:
            raise LayoutError(f"Qubit {qubit} outside layout of {self.total_qubits} qubits")
        offset = 0
        for r in self._registers:
            if qubit < offset + r.qubits:
                if r.dim != 2**r.qubits:
                    raise LayoutError(f"Qubit {qubit} lies in compressed register {r.name!r}")
                return self.register_sites(r.name)[qubit - offset]
            offset += r.qubits
        raise LayoutError(f"Qubit {qubit} outside layout")  # pragma: no cover

    def resolve(self, names: Iterable[str] | str) -> tuple[str, ...]:
        """Validate a set of register names and return them in layout order."""
        if isinstance(names, str):
            names = [names]
        wanted = set(names)
        for name in wanted:
            self.index(name)
        return tuple(n for n in self.names if n in wanted)

    def subset(self, names: Iterable[str] | str) -> "RegisterLayout":
        return RegisterLayout(self.register(n) for n in self.resolve(names))

    def complement(self, names: Iterable[str] | str) -> tuple[str, ...]:
        keep = set(self.resolve(names))
        return tuple(n for n in self.names if n not in keep)

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        clash = set(self.names) & set(other.names)
        if clash:
            raise LayoutError(f"Register name collision: {sorted(clash)}")
        return RegisterLayout(self._registers + other.registers)

    def rename(self, mapping: dict[str, str]) -> "RegisterLayout":
        return RegisterLayout(
            Register(mapping.get(r.name, r.name), r.qubits, r.dim) for r in self._registers
        )

    def to_pairs(self) -> list[list]:
        """[[name, qubits], ...] as used by the JSON formats; compressed registers add their dim."""
        return [[r.name, r.qubits] if r.dim == 2**r.qubits else [r.name, r.qubits, r.dim] for r in self._registers]

    def __iter__(self) -> Iterator[Register]:
        return iter(self._registers)

    def __len__(self) -> int:
        return len(self._registers)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RegisterLayout) and self._registers == other._registers

    def __hash__(self) -> int:
        return hash(self._registers)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{r.name}:{r.qubits}" + ("" if r.dim == 2**r.qubits else f"/{r.dim}")
            for r in self._registers
        )
        return f"RegisterLayout({parts})"
