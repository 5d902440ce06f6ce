#pragma once

#include "hardy_henon/params.hpp"
#include "hardy_henon/specialfn.hpp"
#include "hardy_henon/quadrature.hpp"
#include "hardy_henon/profile.hpp"
#include "hardy_henon/fraclap.hpp"
#include "hardy_henon/extension.hpp"
#include "hardy_henon/cylinder.hpp"
#include "hardy_henon/energy.hpp"
#include "hardy_henon/kelvin.hpp"
#include "hardy_henon/report.hpp"
#include "hardy_henon/acceptance.hpp"
