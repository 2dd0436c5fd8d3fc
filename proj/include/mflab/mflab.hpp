#pragma once

#include "mflab/errors.hpp"
#include "mflab/core/grid.hpp"
#include "mflab/core/lattice_ops.hpp"
#include "mflab/core/observable.hpp"
#include "mflab/core/states.hpp"
#include "mflab/random_field.hpp"
#include "mflab/hartree.hpp"
#include "mflab/manybody/fock_basis.hpp"
#include "mflab/manybody/hamiltonian.hpp"
#include "mflab/manybody/state.hpp"
#include "mflab/manybody/propagation.hpp"
#include "mflab/manybody/density_matrix.hpp"
#include "mflab/ensemble.hpp"
