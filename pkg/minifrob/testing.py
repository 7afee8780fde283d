# type: ignore

from typing import Callable, Generic, List, Tuple, TypeVar

A = TypeVar("A")


class RingLaws(Generic[A]):
    """Identities every exact ring element must satisfy.

    Each law returns ``(lhs, rhs)``; a test asserts ``lhs == rhs``. Names
    ending in ``3`` take three arguments, the rest take one.
    """

    @staticmethod
    def double_neg(a: A) -> Tuple[A, A]:
        "Negate twice"
        return -(-a), a

    @staticmethod
    def add_zero(a: A) -> Tuple[A, A]:
        "Add the zero constant"
        return a + 0, a

    @staticmethod
    def mul_one(a: A) -> Tuple[A, A]:
        "Multiply by the one constant"
        return a * 1, a

    @staticmethod
    def sub_self(a: A) -> Tuple[A, A]:
        "Subtract from itself"
        return a - a, a * 0

    @staticmethod
    def double(a: A) -> Tuple[A, A]:
        "Sum against scalar multiple"
        return a + a, a * 2

    @staticmethod
    def square(a: A) -> Tuple[A, A]:
        "Square against the negated square"
        return a * a, (-a) * (-a)

    @staticmethod
    def add_comm3(a: A, b: A, c: A) -> Tuple[A, A]:
        return a + b, b + a

    @staticmethod
    def mul_comm3(a: A, b: A, c: A) -> Tuple[A, A]:
        return a * b, b * a

    @staticmethod
    def add_assoc3(a: A, b: A, c: A) -> Tuple[A, A]:
        return (a + b) + c, a + (b + c)

    @staticmethod
    def mul_assoc3(a: A, b: A, c: A) -> Tuple[A, A]:
        return (a * b) * c, a * (b * c)

    @staticmethod
    def distrib3(a: A, b: A, c: A) -> Tuple[A, A]:
        return a * (b + c), a * b + a * c

    @staticmethod
    def sub_add3(a: A, b: A, c: A) -> Tuple[A, A]:
        return (a - b) + b, a

    @classmethod
    def _tests(
        cls,
    ) -> Tuple[List[Tuple[str, Callable[[A], Tuple[A, A]]]], List[Tuple[str, Callable[[A, A, A], Tuple[A, A]]]]]:
        """
        Returns the one-argument and three-argument laws.
        """
        one_arg = []
        three_arg = []
        for k in dir(RingLaws):
            if callable(getattr(RingLaws, k)) and not k.startswith("_"):
                tup = (k, getattr(cls, k))
                if k.endswith("3"):
                    three_arg.append(tup)
                else:
                    one_arg.append(tup)
        return one_arg, three_arg


class DerivationLaws(Generic[A]):
    """Leibniz-type identities for a derivation ``D`` (``D(a)`` via `apply`)."""

    @staticmethod
    def additive(D: Callable[[A], A], a: A, b: A) -> Tuple[A, A]:
        return D(a + b), D(a) + D(b)

    @staticmethod
    def leibniz(D: Callable[[A], A], a: A, b: A) -> Tuple[A, A]:
        return D(a * b), D(a) * b + a * D(b)

    @staticmethod
    def square(D: Callable[[A], A], a: A, b: A) -> Tuple[A, A]:
        return D(a * a), D(a) * a * 2

    @classmethod
    def _tests(cls) -> List[Tuple[str, Callable[[Callable[[A], A], A, A], Tuple[A, A]]]]:
        return [(k, getattr(cls, k)) for k in dir(DerivationLaws) if not k.startswith("_") and callable(getattr(cls, k))]
