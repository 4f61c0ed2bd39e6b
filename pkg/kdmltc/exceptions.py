# -*- coding: utf-8 -*-
#  This file is part of kdmltc.
#
#  kdmltc is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  kdmltc is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with kdmltc.  If not, see <http://www.gnu.org/licenses/>.
#
# Copyright 2026 the kdmltc developers

"""Exceptions raised by kdmltc"""


class KdmltcError(Exception):
    pass


class DataError(KdmltcError, ValueError):
    """Input data (corpus, vocabulary, predictions, checkpoints) is unusable"""
    pass


class VocabularyError(DataError):
    pass


class CorpusFormatError(DataError):
    """A corpus record could not be parsed or validated"""
    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = "line %d: %s" % (lineno, msg)
        super(CorpusFormatError, self).__init__(msg)
        self.lineno = lineno


class PredictionFormatError(DataError):
    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = "line %d: %s" % (lineno, msg)
        super(PredictionFormatError, self).__init__(msg)
        self.lineno = lineno


class CheckpointError(DataError):
    pass


class NonFiniteGradientError(KdmltcError, FloatingPointError):
    def __init__(self, layer):
        super(NonFiniteGradientError, self).__init__("non-finite gradient in layer '%s'" % layer)
        self.layer = layer


class InvariantError(KdmltcError, AssertionError):
    pass


class NonFiniteUpdateError(NonFiniteGradientError):
    """Finite gradient whose step would leave a parameter non-finite"""
    def __init__(self, layer):
        KdmltcError.__init__(self, "gradient step overflows layer '%s'" % layer)
        self.layer = layer
