#pragma once

#include "m3/ast.hpp"
#include "m3/diagnostic.hpp"
#include "m3/error.hpp"
#include "m3/extract.hpp"
#include "m3/lexer.hpp"
#include "m3/loc.hpp"
#include "m3/metrics.hpp"
#include "m3/model.hpp"
#include "m3/parser.hpp"
#include "m3/rel.hpp"
#include "m3/resolve.hpp"
#include "m3/serial.hpp"
#include "m3/source.hpp"
#include "m3/typesym.hpp"
