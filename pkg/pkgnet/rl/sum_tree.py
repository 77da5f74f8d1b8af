"""Binary sum tree over a fixed number of leaves"""

import numpy as np

from pkgnet.errors import ContractError


class SumTree:
    """
    Leaves hold non-negative priorities; every inner node holds the sum of
    its children, so the root is the total mass and a prefix-sum lookup
    descends in O(log n).

    The leaf level is padded with zero leaves to a power of two so that
    leaves sit left to right in index order.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ContractError(f"SumTree capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.width = 1 << (capacity - 1).bit_length()
        self.nodes = np.zeros(2 * self.width - 1, dtype=np.float64)

    @property
    def total(self) -> float:
        return float(self.nodes[0])

    def leaves(self) -> np.ndarray:
        first = self.width - 1
        return self.nodes[first:first + self.capacity]

    def __getitem__(self, index: int) -> float:
        return float(self.nodes[self.width - 1 + index])

    def update(self, index: int, priority: float) -> None:
        if not 0 <= index < self.capacity:
            raise ContractError(f"leaf {index} outside [0, {self.capacity})")
        if priority < 0 or not np.isfinite(priority):
            raise ContractError(f"priority must be finite and non-negative, got {priority}")
        node = self.width - 1 + index
        self.nodes[node] = priority
        while node > 0:
            node = (node - 1) // 2
            self.nodes[node] = self.nodes[2 * node + 1] + self.nodes[2 * node + 2]

    def find(self, value: float) -> int:
        """Leaf whose cumulative interval contains `value` in [0, total)"""
        value = min(max(value, 0.0), np.nextafter(self.total, 0.0))
        node = 0
        while node < self.width - 1:
            left = 2 * node + 1
            if value < self.nodes[left] or self.nodes[left + 1] <= 0.0:
                node = left
            else:
                value -= self.nodes[left]
                node = left + 1
        return node - (self.width - 1)
