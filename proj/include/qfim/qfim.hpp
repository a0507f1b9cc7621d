#ifndef QFIM_QFIM_HPP
#define QFIM_QFIM_HPP

#include "qfim/closed_forms.hpp"
#include "qfim/estimation.hpp"
#include "qfim/gram.hpp"
#include "qfim/psf.hpp"
#include "qfim/sld.hpp"
#include "qfim/types.hpp"

#endif  // QFIM_QFIM_HPP
