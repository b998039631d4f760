# -*- coding: utf-8 -*-

# The lack of a module docstring for this module is **INTENTIONAL**.
# The module is imported into the documentation using Sphinx's autodoc
# extension, and its member function documentation is automatically incorporated
# there as needed.

import copy
from collections import OrderedDict

import yaml

from validator_collection import checkers

from vocalfoley.utilities import json, parse_yaml, parse_json, sha256_hex
from vocalfoley.errors import VocalFoleyError, ConfigurationError, ExtraKeyError, \
    DeserializationError


class ConfigurationMixin(object):
    """Mixin that provides dict / JSON / YAML serialization and
    de-serialization support to configuration objects.

    Subclasses declare their fields in ``_fields``, an ordered sequence of
    ``(name, default)`` pairs. Each field is expected to be a property whose
    setter validates the incoming value. Nested configuration sections are
    declared in ``_sections``, a sequence of ``(name, class)`` pairs.
    """

    _fields = ()
    _sections = ()

    def __init__(self, *args, **kwargs):
        error_on_extra_keys = kwargs.pop('error_on_extra_keys', True)

        for name, default in self._fields:
            setattr(self, name, copy.deepcopy(default))

        for name, section_class in self._sections:
            setattr(self, name, section_class())

        self._apply(kwargs, error_on_extra_keys = error_on_extra_keys)

        super(ConfigurationMixin, self).__init__(*args)

    @classmethod
    def _field_names(cls):
        return [x[0] for x in cls._fields]

    @classmethod
    def _section_classes(cls):
        return OrderedDict(cls._sections)

    def _apply(self, input_data, error_on_extra_keys = True):
        field_names = self._field_names()
        sections = self._section_classes()

        extra_keys = [x for x in input_data
                      if x not in field_names and x not in sections]
        if extra_keys and error_on_extra_keys:
            raise ExtraKeyError(
                '%s does not recognize: %s' % (self.__class__.__name__,
                                               ', '.join(sorted(extra_keys)))
            )

        for key, value in input_data.items():
            if key in sections:
                section = getattr(self, key)
                if isinstance(value, ConfigurationMixin):
                    setattr(self, key, copy.deepcopy(value))
                elif value is not None:
                    if not checkers.is_dict(value):
                        raise DeserializationError(
                            'section "%s" expects a mapping, received %s' % (key,
                                                                            type(value))
                        )
                    section.update_from_dict(value,
                                             error_on_extra_keys = error_on_extra_keys)
            elif key in field_names:
                try:
                    setattr(self, key, value)
                except VocalFoleyError:
                    raise
                except (ValueError, TypeError) as error:
                    raise ConfigurationError('%s.%s: invalid value %r (%s)' % (
                        self.__class__.__name__, key, value, error))

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__,
                           ', '.join('%s = %r' % (x, getattr(self, x))
                                     for x in self._field_names()))

    def __eq__(self, other):
        return isinstance(other, type(self)) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self.__eq__(other)

    def to_dict(self):
        """Return a :class:`OrderedDict <python:collections.OrderedDict>`
        representation of the configuration, including nested sections.

        :rtype: :class:`OrderedDict <python:collections.OrderedDict>`
        """
        as_dict = OrderedDict()
        for name in self._field_names():
            value = getattr(self, name)
            if isinstance(value, tuple):
                value = list(value)
            as_dict[name] = value

        for name in self._section_classes():
            as_dict[name] = getattr(self, name).to_dict()

        return as_dict

    def to_json(self, serialize_function = None, **kwargs):
        """Return a JSON representation of the configuration.

        :param serialize_function: Optionally override the default JSON serializer.
          Defaults to :obj:`None <python:None>`, which applies ``simplejson.dumps()``.
        :type serialize_function: callable / :obj:`None <python:None>`

        :rtype: :class:`str <python:str>`
        """
        if serialize_function is None:
            serialize_function = json.dumps
        elif checkers.is_callable(serialize_function) is False:
            raise ValueError(
                'serialize_function (%s) is not callable' % serialize_function
            )

        return serialize_function(self.to_dict(), **kwargs)

    def to_yaml(self, serialize_function = None, **kwargs):
        """Return a YAML representation of the configuration.

        :param serialize_function: Optionally override the default YAML serializer.
          Defaults to :obj:`None <python:None>`, which applies ``yaml.safe_dump()``.
        :type serialize_function: callable / :obj:`None <python:None>`

        :rtype: :class:`str <python:str>`
        """
        if serialize_function is None:
            serialize_function = yaml.safe_dump
            kwargs.setdefault('default_flow_style', False)
            kwargs.setdefault('sort_keys', False)
        elif checkers.is_callable(serialize_function) is False:
            raise ValueError(
                'serialize_function (%s) is not callable' % serialize_function
            )

        return serialize_function(json.loads(self.to_json()), **kwargs)

    def config_hash(self):
        """Return the SHA-256 hex digest of the canonical JSON form of the
        configuration.

        :rtype: :class:`str <python:str>`
        """
        return sha256_hex(json.loads(self.to_json()))

    def update_from_dict(self,
                         input_data,
                         error_on_extra_keys = True):
        """Update the configuration from data in a :class:`dict <python:dict>`.

        :param input_data: The input :class:`dict <python:dict>`
        :type input_data: :class:`dict <python:dict>`

        :param error_on_extra_keys: If ``True``, will raise an error if an
          unrecognized key is found in ``input_data``. If ``False``, unrecognized
          keys are dropped. Defaults to ``True``.
        :type error_on_extra_keys: :class:`bool <python:bool>`

        :raises ExtraKeyError: if ``error_on_extra_keys`` is ``True`` and
          ``input_data`` contains unrecognized keys
        :raises DeserializationError: if ``input_data`` is not a
          :class:`dict <python:dict>`
        """
        if input_data is None:
            return

        if not checkers.is_dict(input_data):
            raise DeserializationError('input_data is not a dict')

        self._apply(input_data, error_on_extra_keys = error_on_extra_keys)

    @classmethod
    def new_from_dict(cls,
                      input_data,
                      error_on_extra_keys = True):
        """Create a new configuration from data in a :class:`dict <python:dict>`.

        :raises ExtraKeyError: if ``error_on_extra_keys`` is ``True`` and
          ``input_data`` contains unrecognized keys
        :raises DeserializationError: if ``input_data`` is not a
          :class:`dict <python:dict>`
        """
        instance = cls()
        instance.update_from_dict(input_data or {},
                                  error_on_extra_keys = error_on_extra_keys)

        return instance

    @classmethod
    def new_from_yaml(cls,
                      input_data,
                      error_on_extra_keys = True,
                      **kwargs):
        """Create a new configuration from a YAML string or file."""
        return cls.new_from_dict(parse_yaml(input_data, **kwargs) or {},
                                 error_on_extra_keys = error_on_extra_keys)

    @classmethod
    def new_from_json(cls,
                      input_data,
                      error_on_extra_keys = True,
                      **kwargs):
        """Create a new configuration from a JSON string or file."""
        return cls.new_from_dict(parse_json(input_data, **kwargs) or {},
                                 error_on_extra_keys = error_on_extra_keys)
