#ifndef RADBIF_RADBIF_HPP
#define RADBIF_RADBIF_HPP

#include "radbif/branch.hpp"
#include "radbif/curves.hpp"
#include "radbif/diagnostics.hpp"
#include "radbif/error.hpp"
#include "radbif/frame.hpp"
#include "radbif/io.hpp"
#include "radbif/layer1d.hpp"
#include "radbif/ode.hpp"
#include "radbif/params.hpp"
#include "radbif/roots.hpp"
#include "radbif/shooting.hpp"
#include "radbif/singular.hpp"
#include "radbif/verify.hpp"

#endif  // RADBIF_RADBIF_HPP
