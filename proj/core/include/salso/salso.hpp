#pragma once

#include "salso/allocation.hpp"
#include "salso/contingency.hpp"
#include "salso/engine.hpp"
#include "salso/errors.hpp"
#include "salso/labels.hpp"
#include "salso/losses.hpp"
#include "salso/oracle.hpp"
