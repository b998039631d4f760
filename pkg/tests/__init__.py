# -*- coding: utf-8 -*-

"""
************************
Testing Philosophy
************************

.. note::

  Unit tests for **VocalFoley** are written using `pytest`_ and
  test automation is provided by `tox`_.

When building **VocalFoley**, we decided to focus on practicality. That means:

  * **DRY is good, KISS is better.** The test suite makes extensive use of
    fixtures and parametrization, so that the expected result and the expected
    failure of a function live in the same table.
  * **Signals over recordings.** Audio tests run on synthetic signals (sines,
    harmonic tones, noise bursts) whose pitch, centroid and duration are known
    in advance, and on a small generated toy corpus. No test needs the real
    ESC-50 dataset or recorded imitations.
  * **Small models.** Decoder tests use a tiny configuration (an 8-bin mel, a
    five-token codebook and a few frames) so that a training step takes
    milliseconds. Full training runs are marked ``slow``.

************************
Test Organization
************************

Each test module (e.g. ``test_quantizer.py``) corresponds to one module of the
library. For example:

* ``test_quantizer.py`` tests the codebook found in ``vocalfoley/quantizer.py``
* ``test_training.py`` tests the training loop found in
  ``vocalfoley/decoder/training.py``
* ``test_pipeline.py`` runs the end-to-end workflow on the toy corpus

Shared signals, tiny model builders and the toy corpus are defined in
``tests/fixtures.py``; configuration files used as test inputs live in
``tests/input_files/``.

**************************************
Configuring & Running Tests
**************************************

Installing with the Test Suite
=================================

.. tabs::

  .. tab:: Installing via pip

    .. code-block:: bash

      $ pip install vocalfoley[tests]

  .. tab:: From Local Development Environment

    .. code-block:: bash

      $ pip install -e .[tests]

Command-line Options
=====================

``--inputs``
  Directory holding the input files. Defaults to ``tests/input_files``.

``--runslow``
  Also run the tests marked ``slow``: the overfit check, the end-to-end toy
  workflow and the CLI workflow.

.. tip::

  For a full list of the CLI options, including the defaults available, try:

  .. code-block:: bash

    vocalfoley $ pytest --help

Running Tests
==============

.. tabs::

  .. tab:: Entire Test Suite

    .. code-block:: bash

      $ pytest tests/

  .. tab:: Including Slow Tests

    .. code-block:: bash

      $ pytest tests/ --runslow

  .. tab:: Test Function

    .. code-block:: bash

      $ pytest tests/test_metrics.py -k 'test_effective_duration'

*****************
Skipping Tests
*****************

Tests marked ``@pytest.mark.slow`` are skipped unless ``--runslow`` is passed.

*******************
Incremental Tests
*******************

Tests defined as methods of a class decorated with ``@pytest.mark.incremental``
execute in order, and the remaining methods are marked as expected failures
once one of them fails. Use the session-scoped ``state`` fixture to pass values
between them.

.. target-notes::

.. _`pytest`: https://docs.pytest.org/en/latest/
.. _`tox`: https://tox.readthedocs.io
"""
