#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
A small reverse-mode automatic differentiation tape over numpy arrays.

Values are batched arrays; every recorded operation stores the
indices of its parents, a forward function (so the tape can be
replayed) and a vector-Jacobian product. Nodes are appended in
evaluation order, so the tape is topologically sorted by
construction and :func:`backward` visits each node once, newest
first.

Broadcasting is deliberately narrow: :meth:`Tape.add` accepts a row
vector added to a batch, everything else requires equal shapes.

Example::

    tape = Tape()
    w = tape.parameter(np.array(3.0))
    loss = tape.square(w)
    backward(tape, loss)  # -> [array(6.)]
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np

from perfmetrics import Metric

from ._loglevels import TRACE
from .interfaces import ShapeMismatchError
from .interfaces import TapeError

__all__ = [
    'Tape',
    'Variable',
    'backward',
]


class Variable(object):
    """
    A handle on a node recorded on a :class:`Tape`.
    """

    __slots__ = ('tape', 'index', 'value')

    def __init__(self, tape, index, value):
        self.tape = tape
        self.index = index
        self.value = value

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return '<Variable %d %s %s>' % (self.index, self.tape._ops[self.index], self.shape)


def _sum_to(grad, shape):
    if grad.shape == shape:
        return grad
    return np.sum(grad, axis=tuple(range(grad.ndim - len(shape)))).reshape(shape)


class Tape(object):
    """
    An append-only record of elementary operations.

    .. attribute:: parameters

       The parameter leaves in registration order; :func:`backward`
       returns their gradients in the same order.
    """

    def __init__(self):
        self._values = []
        self._parents = []
        self._forward = []
        self._vjp = []
        self._ops = []
        self.parameters = []

    def __len__(self):
        return len(self._values)

    def _record(self, op, value, parents=(), forward=None, vjp=None):
        index = len(self._values)
        self._values.append(value)
        self._parents.append(tuple(p.index for p in parents))
        self._forward.append(forward)
        self._vjp.append(vjp)
        self._ops.append(op)
        return Variable(self, index, value)

    def _own(self, *variables):
        for v in variables:
            if not isinstance(v, Variable) or v.tape is not self:
                raise TapeError("%r is not recorded on this tape" % (v,))

    # Leaves

    def constant(self, value):
        return self._record('constant', np.asarray(value, dtype=float))

    def parameter(self, value):
        var = self._record('parameter', np.asarray(value, dtype=float))
        self.parameters.append(var)
        return var

    # Elementary operations

    def add(self, a, b):
        """
        ``a + b``. *b* may be a row vector matching the trailing axis
        of *a*.
        """
        self._own(a, b)
        if a.shape != b.shape and (b.value.ndim != 1 or a.shape[-1:] != b.shape):
            raise ShapeMismatchError("Cannot add shapes %s and %s" % (a.shape, b.shape))
        shape_a, shape_b = a.shape, b.shape
        return self._record(
            'add', a.value + b.value, (a, b),
            lambda x, y: x + y,
            lambda g, x, y, out: (g, _sum_to(g, shape_b) if shape_b != shape_a else g))

    def mul(self, a, b):
        "Elementwise ``a * b`` of equal shapes."
        self._own(a, b)
        if a.shape != b.shape:
            raise ShapeMismatchError("Cannot multiply shapes %s and %s" % (a.shape, b.shape))
        return self._record(
            'mul', a.value * b.value, (a, b),
            lambda x, y: x * y,
            lambda g, x, y, out: (g * y, g * x))

    def scale(self, a, c):
        "``c * a`` for a constant scalar *c*."
        self._own(a)
        c = float(c)
        return self._record(
            'scale', a.value * c, (a,),
            lambda x: x * c,
            lambda g, x, out: (g * c,))

    def matvec(self, x, W):
        """
        ``x @ W.T``: apply the matrix *W* (a variable or a constant
        array ``[out, in]``) to every row of the batch *x*.
        """
        if isinstance(W, Variable):
            self._own(x, W)
            if W.value.ndim != 2 or W.shape[1] != x.shape[-1]:
                raise ShapeMismatchError("Cannot apply %s to %s" % (W.shape, x.shape))
            return self._record(
                'matvec', x.value @ W.value.T, (x, W),
                lambda v, w: v @ w.T,
                lambda g, v, w, out: (g @ w, g.reshape(-1, g.shape[-1]).T
                                      @ v.reshape(-1, v.shape[-1])))
        self._own(x)
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[1] != x.shape[-1]:
            raise ShapeMismatchError("Cannot apply %s to %s" % (W.shape, x.shape))
        return self._record(
            'matvec', x.value @ W.T, (x,),
            lambda v: v @ W.T,
            lambda g, v, out: (g @ W,))

    def relu(self, a):
        # relu'(0) = 0
        self._own(a)
        return self._record(
            'relu', np.maximum(a.value, 0.0), (a,),
            lambda x: np.maximum(x, 0.0),
            lambda g, x, out: (np.where(x > 0, g, 0.0),))

    def exp(self, a):
        self._own(a)
        return self._record(
            'exp', np.exp(a.value), (a,),
            np.exp,
            lambda g, x, out: (g * out,))

    def square(self, a):
        self._own(a)
        return self._record(
            'square', a.value * a.value, (a,),
            lambda x: x * x,
            lambda g, x, out: (2.0 * g * x,))

    def reduce_sum(self, a, axis=None):
        """
        Sum over *axis* (an int) or over everything.
        """
        self._own(a)
        shape = a.shape
        if axis is None:
            return self._record(
                'reduce_sum', np.sum(a.value), (a,),
                np.sum,
                lambda g, x, out: (np.broadcast_to(g, shape).copy(),))
        return self._record(
            'reduce_sum', np.sum(a.value, axis=axis), (a,),
            lambda x: np.sum(x, axis=axis),
            lambda g, x, out: (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),))

    def mean(self, a):
        "The mean of all entries, a scalar."
        self._own(a)
        shape, size = a.shape, a.value.size
        return self._record(
            'mean', np.mean(a.value), (a,),
            np.mean,
            lambda g, x, out: (np.full(shape, g / size),))

    def concat(self, parts, axis=-1):
        self._own(*parts)
        sizes = np.cumsum([p.shape[axis] for p in parts])[:-1]
        return self._record(
            'concat', np.concatenate([p.value for p in parts], axis=axis), parts,
            lambda *xs: np.concatenate(xs, axis=axis),
            lambda g, *rest: tuple(np.split(g, sizes, axis=axis)))

    def custom(self, inputs, forward, vjp, name='custom'):
        """
        Record a composite operation.

        :param forward: ``forward(*input_values) -> value``.
        :param vjp: ``vjp(g, *input_values) -> tuple`` of cotangents,
            one per input, each shaped like its input.
        """
        inputs = tuple(inputs)
        self._own(*inputs)
        value = forward(*(v.value for v in inputs))
        return self._record(name, value, inputs, forward,
                            lambda g, *rest: vjp(g, *rest[:-1]))

    def replay(self):
        """
        Recompute every node from the leaves and return the values.
        """
        values = []
        for index, forward in enumerate(self._forward):
            if forward is None:
                values.append(self._values[index])
            else:
                values.append(forward(*(values[p] for p in self._parents[index])))
        return values

    def __repr__(self):
        return '<%s nodes=%d parameters=%d>' % (
            type(self).__name__, len(self), len(self.parameters))


@Metric('alphapotential.backward', rate=0.1)
def backward(tape, output):
    """
    Reverse-mode gradients of the scalar *output* with respect to every
    parameter leaf of *tape*, in :attr:`Tape.parameters` order.
    Parameters that do not influence *output* get zero gradients.

    :raises TapeError: If *output* is not a scalar recorded on *tape*.
    """
    if not isinstance(output, Variable) or output.tape is not tape:
        raise TapeError("The output %r is not recorded on this tape" % (output,))
    if np.size(output.value) != 1:
        raise TapeError("Can only differentiate a scalar, not shape %s" % (output.shape,))

    values = tape._values # pylint:disable=protected-access
    parents = tape._parents # pylint:disable=protected-access
    vjps = tape._vjp # pylint:disable=protected-access
    grads = [None] * (output.index + 1)
    grads[output.index] = np.ones_like(output.value)
    for index in range(output.index, -1, -1):
        g = grads[index]
        if g is None or not parents[index]:
            continue
        inputs = [values[p] for p in parents[index]]
        for p, partial in zip(parents[index], vjps[index](g, *(inputs + [values[index]]))):
            if grads[p] is None:
                grads[p] = partial
            else:
                grads[p] = grads[p] + partial
        grads[index] = None
    if logger.isEnabledFor(TRACE):
        logger.log(TRACE, "Backward pass over %d nodes", output.index + 1)
    return [np.zeros_like(p.value) if p.index > output.index or grads[p.index] is None
            else grads[p.index]
            for p in tape.parameters]
