#ifndef JOULEBITS_JOULEBITS_HPP
#define JOULEBITS_JOULEBITS_HPP

#include "joulebits/channel.hpp"
#include "joulebits/epiplexity.hpp"
#include "joulebits/errors.hpp"
#include "joulebits/json_io.hpp"
#include "joulebits/mdl.hpp"
#include "joulebits/parallel.hpp"
#include "joulebits/prob.hpp"
#include "joulebits/report.hpp"
#include "joulebits/rng.hpp"
#include "joulebits/thermo.hpp"
#include "joulebits/thermosim.hpp"

#endif  // JOULEBITS_JOULEBITS_HPP
