# -*- coding: utf-8 -*-

"""
************************
vocalfoley.labels
************************

Sound event labels and the versioned label set that maps names to class ids.

"""
import os
from collections import OrderedDict

from validator_collection import validators, checkers

from vocalfoley.utilities import parse_yaml, sha256_hex
from vocalfoley.errors import UnknownLabelError, DeserializationError

DEFAULT_LABELS_PATH = os.path.join(os.path.dirname(__file__), 'data', 'default_labels.yaml')


class EventLabel(object):
    """A sound event class: its id (position in the label set) and name."""

    def __init__(self, class_id, name):
        self.class_id = class_id
        self.name = name

    @property
    def class_id(self):
        """Zero-based class id.

        :rtype: :class:`int <python:int>`
        """
        return self._class_id

    @class_id.setter
    def class_id(self, value):
        try:
            self._class_id = validators.integer(value, minimum = 0)
        except (ValueError, TypeError):
            raise UnknownLabelError('class_id must be a non-negative integer, received %s' % (
                value, ))

    @property
    def name(self):
        return self._name

    @name.setter
    def name(self, value):
        self._name = validators.string(value, allow_empty = False)

    def __repr__(self):
        return 'EventLabel(%d, %r)' % (self.class_id, self.name)

    def __eq__(self, other):
        return isinstance(other, EventLabel) and \
            (self.class_id, self.name) == (other.class_id, other.name)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.class_id, self.name))

    def to_dict(self):
        return OrderedDict([('class_id', self.class_id), ('name', self.name)])


class LabelSet(object):
    """Ordered, duplicate-free collection of :class:`EventLabel` objects.

    :param names: Class names in id order.
    :type names: iterable of :class:`str <python:str>`

    :param version: Version of the label file.
    :type version: :class:`int <python:int>`

    :raises DeserializationError: if ``names`` is empty or contains duplicates
    """

    def __init__(self, names, version = 1):
        names = [validators.string(x, allow_empty = False) for x in names]
        if not names:
            raise DeserializationError('a label set needs at least one label')
        duplicates = sorted(set(x for x in names if names.count(x) > 1))
        if duplicates:
            raise DeserializationError('duplicate labels: %s' % ', '.join(duplicates))

        self.version = validators.integer(version, minimum = 1)
        self._labels = [EventLabel(index, name) for index, name in enumerate(names)]
        self._by_name = dict((x.name, x) for x in self._labels)

    def __len__(self):
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, name):
        return name in self._by_name

    def __eq__(self, other):
        return isinstance(other, LabelSet) and self.names == other.names

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'LabelSet(%d labels, version %d)' % (len(self), self.version)

    @property
    def names(self):
        """Class names in id order."""
        return [x.name for x in self._labels]

    def get(self, name):
        """Return the label called ``name``.

        :raises UnknownLabelError: if ``name`` is not in the set; the message
          lists the valid names
        """
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownLabelError('unknown label "%s"; valid labels: %s' % (
                name, ', '.join(self.names)))

    def by_id(self, class_id):
        """Return the label with id ``class_id``.

        :raises UnknownLabelError: if ``class_id`` is out of range
        """
        if not checkers.is_integer(class_id) or not 0 <= int(class_id) < len(self):
            raise UnknownLabelError('class id %s is outside [0, %d)' % (class_id, len(self)))

        return self._labels[int(class_id)]

    def to_dict(self):
        return OrderedDict([('version', self.version), ('labels', self.names)])

    def checksum(self):
        """SHA-256 of the canonical JSON form of the set."""
        return sha256_hex(self.to_dict())

    @classmethod
    def from_dict(cls, input_data):
        if not checkers.is_dict(input_data) or 'labels' not in input_data:
            raise DeserializationError('label data must be a mapping with a "labels" list')

        return cls(input_data['labels'], version = input_data.get('version', 1))

    @classmethod
    def load(cls, path = None):
        """Load a label set from YAML. :obj:`None <python:None>` loads the
        packaged 31-class set.

        :raises DeserializationError: if the file is missing or malformed
        """
        path = str(path) if path is not None else DEFAULT_LABELS_PATH
        if not checkers.is_file(path):
            raise DeserializationError('label file not found: %s' % path)

        return cls.from_dict(parse_yaml(path))
