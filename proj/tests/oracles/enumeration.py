"""Generate the first N rationals of [0, 1] in Stern-Brocot breadth-first order.

q1 = 0/1, q2 = 1/1, then the tree rooted at 1/2 level by level, each node
being the mediant of its enclosing bounds.
"""
import sys
from collections import deque
from fractions import Fraction


def enumerate_rationals(count):
    out = [Fraction(0, 1), Fraction(1, 1)]
    queue = deque([((0, 1), (1, 1))])
    while len(out) < count:
        (ln, ld), (hn, hd) = queue.popleft()
        num, den = ln + hn, ld + hd
        out.append(Fraction(num, den))
        queue.append(((ln, ld), (num, den)))
        queue.append(((num, den), (hn, hd)))
    return out[:count]


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100
    for m, q in enumerate(enumerate_rationals(n), start=1):
        print(m, q.numerator, q.denominator)
