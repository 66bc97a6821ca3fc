#pragma once

#include "qentro/capacity.hpp"
#include "qentro/channel.hpp"
#include "qentro/continuity.hpp"
#include "qentro/entropy.hpp"
#include "qentro/error.hpp"
#include "qentro/operator_core.hpp"
#include "qentro/random.hpp"
