#pragma once

#include "perturbatrix/core.hpp"
#include "perturbatrix/linalg/assignment.hpp"
#include "perturbatrix/linalg/general_eig.hpp"
#include "perturbatrix/linalg/hermitian_eig.hpp"
#include "perturbatrix/linalg/householder.hpp"
#include "perturbatrix/linalg/matrix_exp.hpp"
#include "perturbatrix/linalg/norms.hpp"
#include "perturbatrix/linalg/polynomial.hpp"
#include "perturbatrix/linalg/svd.hpp"
