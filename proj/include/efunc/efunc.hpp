#pragma once

#include "efunc/error.hpp"
#include "efunc/bigfloat.hpp"
#include "efunc/ball.hpp"
#include "efunc/linalg.hpp"
#include "efunc/poly.hpp"
#include "efunc/roots.hpp"
#include "efunc/number_field.hpp"
#include "efunc/ratfun.hpp"
#include "efunc/parser.hpp"
#include "efunc/efun.hpp"
#include "efunc/numeval.hpp"
#include "efunc/desing.hpp"
#include "efunc/dioph.hpp"
#include "efunc/catalog.hpp"
#include "efunc/specfile.hpp"
