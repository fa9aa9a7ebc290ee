#ifndef DESCENT_DESCENT_HPP
#define DESCENT_DESCENT_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"
#include "descent/linesearch.hpp"
#include "descent/losses.hpp"
#include "descent/objectives.hpp"
#include "descent/optimizer.hpp"
#include "descent/optimizers.hpp"
#include "descent/sampling.hpp"
#include "descent/spl.hpp"

#endif  // DESCENT_DESCENT_HPP
