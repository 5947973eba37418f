"""Preprocessing to answer maximum-over-a-run-of-teeth queries in constant time."""

from typing import Generic, List, Optional, Sequence, TypeVar

Height = TypeVar("Height")


def _ilog2(value: int) -> int:
    """Integral part of the base-2 logarithm of a positive integer."""
    return value.bit_length() - 1


class RangeMaxIndex(Generic[Height]):
    """
    Sparse table over tooth heights.

    The heights cannot be changed after construction, so an index can be
    shared between threads. Heights may be floats or Fractions: only
    comparisons are performed, never arithmetic.
    """

    def __init__(self, heights: Sequence[Height]):
        """
        Pre-compute the sparse table.

        Complexity: O(N log N), where N = len(heights).

        :param heights: tooth heights in position order
        """
        length = len(heights)
        self.length = length
        levels = _ilog2(length) + 1 if length else 0

        # table[depth][i] is the maximum of heights[i : i + 2**depth]
        self.table: List[List[Height]] = [list(heights)] if length else []
        for depth in range(1, levels):
            half = 2 ** (depth - 1)
            previous = self.table[depth - 1]
            self.table.append(
                [
                    max(previous[i], previous[i + half])
                    for i in range(length - 2**depth + 1)
                ]
            )

    def query(self, first: int, last: int) -> Optional[Height]:
        """
        Maximum of the heights of teeth first..last (both included).

        Complexity: O(1).

        :returns: the maximum, or None when the run is empty (first > last)
        """
        if first > last:
            return None
        if first < 0 or last >= self.length:
            raise IndexError(f"run {first}..{last} outside 0..{self.length - 1}")
        depth = _ilog2(last - first + 1)
        row = self.table[depth]
        return max(row[first], row[last - 2**depth + 1])

    def __len__(self) -> int:
        return self.length
